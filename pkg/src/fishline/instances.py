"""SALBP-style ``.alb`` files and seeded mixed-model instance synthesis.

``.alb`` layout (blank lines ignored)::

    T                 number of tasks
    t_1 ... t_T       one task time per line
    a,b               precedence pairs, one per line
    -1,-1             terminator
    C                 cycle time

Anything after the cycle-time line is ignored.

A mixed-model spec is stored as an INI file (see :func:`write_spec`)::

    [instance]    name, num_tasks, num_models, cycle_time, generator_seed
    [base]        times, precedence
    [zones]       zones
    [displacement] row1 .. rowZ
    [models]      production_levels, factors1 .. factorsI
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .balancing import BalancingInstance, ModelData, build_mean_model, check_acyclic


class AlbParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class AlbFile:
    num_tasks: int
    task_times: np.ndarray
    precedence_pairs: list
    cycle_time: float

    def __post_init__(self):
        self.task_times = np.asarray(self.task_times, dtype=float)
        self.precedence_pairs = [(int(a), int(b)) for a, b in self.precedence_pairs]
        if self.task_times.shape != (self.num_tasks,):
            raise ValueError(f"expected {self.num_tasks} task times, got {self.task_times.size}")

    def __eq__(self, other):
        if not isinstance(other, AlbFile):
            return NotImplemented
        return (self.num_tasks == other.num_tasks
                and np.array_equal(self.task_times, other.task_times)
                and self.precedence_pairs == other.precedence_pairs
                and self.cycle_time == other.cycle_time)


def _fmt(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def _number(text: str, lineno: int, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise AlbParseError(f"expected {what}, got {text!r}", lineno) from None


def parse_alb(text: str, cycle_time: float | None = None) -> AlbFile:
    """Parse ``.alb`` text. ``cycle_time`` is used when the file has no cycle-time line."""
    lines = [(no, line.strip()) for no, line in enumerate(text.splitlines(), start=1)]
    lines = [(no, line) for no, line in lines if line]
    if not lines:
        raise AlbParseError("empty file")
    it = iter(lines)

    no, head = next(it)
    n = _number(head, no, "the number of tasks")
    if not n.is_integer() or n < 1:
        raise AlbParseError(f"number of tasks must be a positive integer, got {head!r}", no)
    n = int(n)

    times = []
    for _ in range(n):
        try:
            no, line = next(it)
        except StopIteration:
            raise AlbParseError(f"expected {n} task times, found {len(times)}") from None
        value = _number(line, no, "a task time")
        if value < 0:
            raise AlbParseError("task times must be non-negative", no)
        times.append(value)

    pairs = []
    for no, line in it:
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise AlbParseError(f"expected a precedence pair 'a,b', got {line!r}", no)
        a, b = (_number(p, no, "a task index") for p in parts)
        if (a, b) == (-1, -1):
            break
        if not (a.is_integer() and b.is_integer() and 1 <= a <= n and 1 <= b <= n):
            raise AlbParseError(f"precedence pair references unknown tasks: {line!r}", no)
        pairs.append((int(a), int(b)))
    else:
        raise AlbParseError("missing '-1,-1' terminator after the precedence pairs")

    nxt = next(it, None)
    if nxt is not None:
        no, line = nxt
        cycle_time = _number(line, no, "the cycle time")
        if cycle_time <= 0:
            raise AlbParseError("cycle time must be positive", no)
    elif cycle_time is None:
        raise AlbParseError("missing cycle time line")

    check_acyclic(n, pairs)
    return AlbFile(n, np.array(times), pairs, float(cycle_time))


def format_alb(alb: AlbFile) -> str:
    out = [str(alb.num_tasks)]
    out += [_fmt(t) for t in alb.task_times]
    out += [f"{a},{b}" for a, b in alb.precedence_pairs]
    out += ["-1,-1", _fmt(alb.cycle_time)]
    return "\n".join(out) + "\n"


def read_alb(path, cycle_time: float | None = None) -> AlbFile:
    return parse_alb(Path(path).read_text(), cycle_time)


def random_alb(num_tasks: int, seed: int = 0, cycle_time: float = 1000.0,
               time_range=(50, 500), edge_probability: float = 0.25,
               max_span: int = 5) -> AlbFile:
    """Synthetic single-model instance with integer times and a local random DAG.

    Edges only go from a task to one of the next ``max_span`` tasks, so
    1..T is always a topological order.
    """
    rng = np.random.default_rng(seed)
    times = rng.integers(time_range[0], time_range[1] + 1, size=num_tasks).astype(float)
    pairs = []
    for a in range(1, num_tasks + 1):
        for b in range(a + 1, min(a + max_span, num_tasks) + 1):
            if rng.random() < edge_probability:
                pairs.append((a, b))
    return AlbFile(num_tasks, times, pairs, float(cycle_time))


@dataclass
class MixedModelSpec:
    base: AlbFile
    production_levels: np.ndarray
    model_time_factors: np.ndarray   # (models, tasks)
    zones: np.ndarray
    displacement: np.ndarray
    generator_seed: int = 0
    name: str = "instance"

    def __post_init__(self):
        self.production_levels = np.asarray(self.production_levels, dtype=np.int64)
        self.model_time_factors = np.atleast_2d(np.asarray(self.model_time_factors, dtype=float))
        self.zones = np.asarray(self.zones, dtype=np.int64)
        self.displacement = np.asarray(self.displacement, dtype=float)
        if self.model_time_factors.shape != (self.num_models, self.base.num_tasks):
            raise ValueError("model_time_factors must have shape (num_models, num_tasks)")
        if np.any(self.model_time_factors <= 0):
            raise ValueError("model time factors must be positive")

    @property
    def num_models(self) -> int:
        return self.production_levels.size

    @property
    def plan_size(self) -> int:
        return int(self.production_levels.sum())

    def models(self) -> list[ModelData]:
        return [ModelData(self.base.task_times * f, int(p))
                for f, p in zip(self.model_time_factors, self.production_levels)]

    def to_instance(self, max_workplaces: int = 3) -> BalancingInstance:
        models = self.models()
        mean_times, joint = build_mean_model(models, [self.base.precedence_pairs] * len(models))
        return BalancingInstance(
            mean_times=mean_times,
            precedence=joint,
            zones=self.zones,
            displacement=self.displacement,
            cycle_time=self.base.cycle_time,
            max_workplaces=max_workplaces,
            models=models,
        )

    def __eq__(self, other):
        if not isinstance(other, MixedModelSpec):
            return NotImplemented
        return (self.base == other.base and self.name == other.name
                and self.generator_seed == other.generator_seed
                and all(np.array_equal(getattr(self, a), getattr(other, a))
                        for a in ("production_levels", "model_time_factors", "zones",
                                  "displacement")))


def _allocate(weights: np.ndarray, total: int) -> np.ndarray:
    """Integer split of ``total`` with every share >= 1 (largest remainder)."""
    n = weights.size
    spare = total - n
    raw = spare * weights / weights.sum()
    share = np.floor(raw).astype(np.int64)
    leftover = spare - share.sum()
    order = np.argsort(-(raw - share), kind="stable")
    share[order[:leftover]] += 1
    return share + 1


def generate_mixed_model(base: AlbFile, num_models: int, plan_size: int = 998, seed: int = 0,
                         factor_range=(0.8, 1.2), displacement_fraction: float = 0.05,
                         num_zones: int = 4, name: str | None = None) -> MixedModelSpec:
    """Seeded mixed-model data around a single-model base instance.

    Per-model times are the base times times a factor drawn uniformly in
    ``factor_range``; production levels are random shares of
    ``plan_size`` with at least one unit per model; zones are uniform
    over ``1..num_zones``; the displacement matrix is symmetric with a
    zero diagonal and entries uniform in ``[0, displacement_fraction * C]``.
    """
    if num_models < 1:
        raise ValueError("num_models must be >= 1")
    if plan_size < num_models:
        raise ValueError("plan_size must be >= num_models")
    rng = np.random.default_rng(seed)
    factors = rng.uniform(factor_range[0], factor_range[1], size=(num_models, base.num_tasks))
    levels = _allocate(rng.random(num_models) + 1e-12, plan_size)
    zones = rng.integers(1, num_zones + 1, size=base.num_tasks)
    upper = np.triu(rng.uniform(0.0, displacement_fraction * base.cycle_time,
                                size=(num_zones, num_zones)), k=1)
    displacement = upper + upper.T
    if name is None:
        name = f"n={base.num_tasks}_{num_models}"
    return MixedModelSpec(base, levels, factors, zones, displacement, seed, name)


def _floats(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def write_spec(spec: MixedModelSpec, path) -> None:
    cfg = configparser.ConfigParser()
    cfg["instance"] = {
        "name": spec.name,
        "num_tasks": str(spec.base.num_tasks),
        "num_models": str(spec.num_models),
        "cycle_time": repr(float(spec.base.cycle_time)),
        "generator_seed": str(spec.generator_seed),
    }
    cfg["base"] = {
        "times": _floats(spec.base.task_times),
        "precedence": " ".join(f"{a},{b}" for a, b in spec.base.precedence_pairs),
    }
    cfg["zones"] = {"zones": " ".join(str(int(z)) for z in spec.zones)}
    cfg["displacement"] = {f"row{i + 1}": _floats(row) for i, row in enumerate(spec.displacement)}
    models = {"production_levels": " ".join(str(int(p)) for p in spec.production_levels)}
    for i, row in enumerate(spec.model_time_factors):
        models[f"factors{i + 1}"] = _floats(row)
    cfg["models"] = models
    buf = io.StringIO()
    cfg.write(buf)
    try:
        Path(path).write_text(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write spec to {path}: {exc}") from exc


def read_spec(path) -> MixedModelSpec:
    cfg = configparser.ConfigParser()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read spec from {path}: {exc}") from exc
    cfg.read_string(text)
    try:
        inst = cfg["instance"]
        n, num_models = int(inst["num_tasks"]), int(inst["num_models"])
        times = [float(v) for v in cfg["base"]["times"].split()]
        pairs = [tuple(int(x) for x in p.split(",")) for p in cfg["base"]["precedence"].split()]
        base = AlbFile(n, times, pairs, float(inst["cycle_time"]))
        zones = [int(z) for z in cfg["zones"]["zones"].split()]
        disp_sec = cfg["displacement"]
        displacement = [[float(v) for v in disp_sec[f"row{i + 1}"].split()]
                        for i in range(len(disp_sec))]
        levels = [int(p) for p in cfg["models"]["production_levels"].split()]
        factors = [[float(v) for v in cfg["models"][f"factors{i + 1}"].split()]
                   for i in range(num_models)]
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed spec file {path}: {exc}") from exc
    check_acyclic(n, pairs)
    return MixedModelSpec(base, levels, factors, zones, displacement,
                          int(inst["generator_seed"]), inst["name"])
