"""Repeated pipeline runs, per-run records and the statistics report."""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from .estimators import SimultaneousSolver
from .instances import MixedModelSpec
from .stats import anova_oneway, f_quantile, group_sample_means, pooled_confidence_intervals

log = logging.getLogger(__name__)

RESULTS_HEADER = ["run_id", "algorithm", "instance", "seed", "CW", "WL", "WP",
                  "IUC_bal", "IUC_seq", "wall_time_ms"]
STATS_HEADER = ["section", "metric", "algorithm", "n", "mean", "half_width", "ci_low",
                "ci_high", "f_statistic", "df_between", "df_within", "f_critical"]
METRICS = ("CW", "WL", "WP", "CW_WL", "IUC_bal", "IUC_seq")


@dataclass
class ExperimentRecord:
    run_id: int
    algorithm: str
    instance: str
    seed: int
    CW: float
    WL: float
    WP: int
    IUC_bal: int
    IUC_seq: int
    wall_time_ms: float

    def metric(self, name: str) -> float:
        if name == "CW_WL":
            return self.CW / self.WL if self.WL > 0 else 1.0
        return float(getattr(self, name))


@dataclass
class MetricStats:
    metric: str
    intervals: dict                 # algorithm -> (mean, half_width, n_means)
    anova: object = None            # AnovaResult, or None with a single algorithm
    f_critical: float | None = None


@dataclass
class ExperimentReport:
    records: list
    failures: list = field(default_factory=list)   # (algorithm, run_id, message)
    stats: dict | None = None                       # metric -> MetricStats
    group_size: int = 15
    confidence: float = 0.95
    workstations: dict = field(default_factory=dict)  # (algorithm, run_id) -> count


def _one_run(spec, instance, algorithm, run_id, seed, solver_params):
    start = time.perf_counter()
    try:
        solver = SimultaneousSolver(algorithm=algorithm, random_state=seed, **solver_params)
        sol = solver.fit(instance).solution_
    except Exception as exc:  # noqa: BLE001 - a failed run must not sink the batch
        return None, (algorithm, run_id, f"{type(exc).__name__}: {exc}"), 0
    elapsed = (time.perf_counter() - start) * 1000.0
    return ExperimentRecord(
        run_id=run_id, algorithm=algorithm, instance=spec.name, seed=seed,
        CW=sol.completed_work, WL=sol.workload, WP=sol.balance.num_workplaces,
        IUC_bal=sol.iuc_balancing, IUC_seq=sol.iuc_sequencing, wall_time_ms=elapsed,
    ), None, sol.balance.num_workstations


def summarize(records, group_size: int = 15, confidence: float = 0.95):
    """Grouped means, pooled intervals and ANOVA per metric.

    Returns ``None`` when some algorithm has fewer than two full groups.
    Trailing runs that do not fill a group are left out.
    """
    by_algo: dict[str, list] = {}
    for rec in records:
        by_algo.setdefault(rec.algorithm, []).append(rec)
    if not by_algo:
        return None
    n_groups = min(len(v) for v in by_algo.values()) // group_size
    if n_groups < 2:
        return None
    used = n_groups * group_size

    stats = {}
    for metric in METRICS:
        means = {}
        for algo, recs in by_algo.items():
            recs = sorted(recs, key=lambda r: r.run_id)[:used]
            means[algo] = group_sample_means([r.metric(metric) for r in recs], group_size)
        ci = pooled_confidence_intervals(means, confidence)
        intervals = {a: (m, h, n_groups) for a, (m, h) in zip(means, ci)}
        anova = f_crit = None
        if len(means) >= 2:
            anova = anova_oneway(means)
            f_crit = f_quantile(confidence, anova.df_between, anova.df_within)
        stats[metric] = MetricStats(metric, intervals, anova, f_crit)
    return stats


def run_experiment(spec: MixedModelSpec, algorithms, repetitions: int, base_seed: int = 0,
                   group_size: int = 15, max_workplaces: int = 3, confidence: float = 0.95,
                   n_jobs: int = 1, **solver_params) -> ExperimentReport:
    """Run every algorithm ``repetitions`` times on one instance.

    Repetition ``r`` of every algorithm uses seed ``base_seed + r``.
    ``solver_params`` go to :class:`~fishline.estimators.SimultaneousSolver`.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    instance = spec.to_instance(max_workplaces)
    # ordered by run_id, then by the given algorithm order
    jobs = [(algo, r) for r in range(repetitions) for algo in algorithms]
    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(_one_run)(spec, instance, algo, r, base_seed + r, solver_params)
        for algo, r in jobs
    )
    records = [rec for rec, _, _ in outcomes if rec is not None]
    failures = [err for _, err, _ in outcomes if err is not None]
    stations = {(rec.algorithm, rec.run_id): n for rec, _, n in outcomes if rec is not None}
    for algo, run_id, message in failures:
        log.warning("run %s/%d failed: %s", algo, run_id, message)
    stats = summarize(records, group_size, confidence)
    if stats is None:
        log.info("not enough repetitions for statistics (group size %d)", group_size)
    return ExperimentReport(records, failures, stats, group_size, confidence, stations)


def _fmt_float(x: float) -> str:
    # shortest round-tripping text, never fewer than four decimals
    return np.format_float_positional(float(x), unique=True, min_digits=4, trim="k")


def write_results_csv(records, path) -> None:
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RESULTS_HEADER)
            for r in records:
                writer.writerow([r.run_id, r.algorithm, r.instance, r.seed, _fmt_float(r.CW),
                                 _fmt_float(r.WL), r.WP, r.IUC_bal, r.IUC_seq,
                                 _fmt_float(r.wall_time_ms)])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_results_csv(path) -> list[ExperimentRecord]:
    casts = {f.name: f.type for f in fields(ExperimentRecord)}
    conv = {"int": int, "float": float, "str": str}
    with open(path, newline="") as fh:
        return [ExperimentRecord(**{k: conv[casts[k]](v) for k, v in row.items()})
                for row in csv.DictReader(fh)]


def write_stats_csv(report: ExperimentReport, path) -> None:
    """One ``ci`` row per (metric, algorithm) and one ``anova`` row per metric."""
    if report.stats is None:
        raise ValueError("report has no statistics section")
    rows = []
    for metric, ms in report.stats.items():
        for algo, (mean, half, n) in ms.intervals.items():
            rows.append(["ci", metric, algo, n, _fmt_float(mean), _fmt_float(half),
                         _fmt_float(mean - half), _fmt_float(mean + half), "", "", "", ""])
        if ms.anova is not None:
            a = ms.anova
            f_text = "inf" if np.isinf(a.f_statistic) else _fmt_float(a.f_statistic)
            rows.append(["anova", metric, "", "", "", "", "", "", f_text, a.df_between,
                         a.df_within, _fmt_float(ms.f_critical)])
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(STATS_HEADER)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write statistics to {path}: {exc}") from exc


def write_report(report: ExperimentReport, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"results": out / "results.csv"}
    write_results_csv(report.records, paths["results"])
    if report.stats is not None:
        paths["stats"] = out / "stats.csv"
        write_stats_csv(report, paths["stats"])
    return paths
