"""Sample-mean grouping, one-way ANOVA and pooled-SD confidence intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaincinv


@dataclass
class AnovaResult:
    f_statistic: float
    df_between: int
    df_within: int
    ss_between: float
    ss_within: float
    group_means: np.ndarray
    grand_mean: float

    @property
    def ms_within(self) -> float:
        return self.ss_within / self.df_within

    @property
    def ss_total(self) -> float:
        return self.ss_between + self.ss_within


def group_sample_means(raw, group_size: int) -> np.ndarray:
    """Means of consecutive chunks of ``group_size`` observations."""
    values = np.asarray(raw, dtype=float)
    if group_size < 1:
        raise ValueError("group_size must be >= 1")
    if values.ndim != 1 or values.size % group_size:
        raise ValueError(f"{values.size} observations cannot be split into groups of {group_size}")
    return values.reshape(-1, group_size).mean(axis=1)


def _as_groups(groups):
    if isinstance(groups, dict):
        groups = list(groups.values())
    return [np.asarray(g, dtype=float) for g in groups]


def anova_oneway(groups) -> AnovaResult:
    """Standard one-way decomposition, ``F = MS_between / MS_within``.

    ``groups`` is a sequence (or name -> values mapping) of 1-d samples.
    F is ``inf`` when the within-group variance vanishes but the group
    means differ, and 0 when both vanish.
    """
    samples = _as_groups(groups)
    if len(samples) < 2:
        raise ValueError("ANOVA needs at least two groups")
    if any(s.size < 2 for s in samples):
        raise ValueError("every group needs at least two observations")

    means = np.array([s.mean() for s in samples])
    sizes = np.array([s.size for s in samples])
    grand = float(np.concatenate(samples).mean())
    ss_between = float(np.sum(sizes * (means - grand) ** 2))
    ss_within = float(sum(np.sum((s - m) ** 2) for s, m in zip(samples, means)))
    df_between = len(samples) - 1
    df_within = int(sizes.sum()) - len(samples)

    ms_between = ss_between / df_between
    ms_within = ss_within / df_within
    if ms_within > 0:
        f = ms_between / ms_within
    else:
        f = math.inf if ms_between > 0 else 0.0
    return AnovaResult(f, df_between, df_within, ss_between, ss_within, means, grand)


def t_quantile(p: float, df: float) -> float:
    """Quantile of Student's t by inverting the regularized incomplete beta.

    For ``p > 1/2``, ``t = sqrt(df (1 - x) / x)`` with ``x = I^{-1}_{2(1-p)}(df/2, 1/2)``.
    """
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if df <= 0:
        raise ValueError("df must be positive")
    if p == 0.5:
        return 0.0
    tail = 2.0 * min(p, 1.0 - p)
    x = float(betaincinv(df / 2.0, 0.5, tail))
    t = math.sqrt(df * (1.0 - x) / x)
    return t if p > 0.5 else -t


def f_quantile(p: float, df1: float, df2: float) -> float:
    """Quantile of the F distribution, via ``x = I^{-1}_p(df1/2, df2/2)``."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    x = float(betaincinv(df1 / 2.0, df2 / 2.0, p))
    return (df2 * x) / (df1 * (1.0 - x))


def pooled_confidence_intervals(groups, confidence: float = 0.95):
    """Per-group ``(mean, half_width)`` using the pooled standard deviation.

    Requires equal group sizes ``m``; the half width is
    ``t_{(1+confidence)/2, df_within} * sqrt(MS_within / m)``.
    """
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie in (0, 1)")
    samples = _as_groups(groups)
    sizes = {s.size for s in samples}
    if len(sizes) != 1:
        raise ValueError("pooled intervals need equal group sizes")
    m = sizes.pop()
    if m < 2:
        raise ValueError("every group needs at least two observations")
    means = [float(s.mean()) for s in samples]
    ss_within = sum(float(np.sum((s - mu) ** 2)) for s, mu in zip(samples, means))
    df_within = len(samples) * (m - 1)
    s_pooled = math.sqrt(ss_within / df_within)
    half = t_quantile((1.0 + confidence) / 2.0, df_within) * s_pooled / math.sqrt(m)
    return [(mu, half) for mu in means]
