"""Mixed-model multi-manned line balancing with zone displacement times.

Tasks are numbered 1..T in every public structure; arrays are indexed
0..T-1. Workstations and workplaces are numbered from 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from graphlib import CycleError, TopologicalSorter

import numpy as np

from ._validation import check_permutation

# fitness assigned to decodes of an infeasible instance; below any real value
# yet finite so fitness differences stay finite
INFEASIBLE_FITNESS = -1e300


class InfeasibleTaskError(ValueError):
    """A task cannot fit into an empty workplace within the cycle time."""


class PrecedenceCycleError(ValueError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("precedence relation contains a cycle: " + " -> ".join(map(str, self.cycle)))


def check_acyclic(num_tasks: int, pairs) -> None:
    graph = {j: set() for j in range(1, num_tasks + 1)}
    for a, b in pairs:
        graph[b].add(a)
    try:
        tuple(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        raise PrecedenceCycleError(exc.args[1]) from None


@dataclass(frozen=True)
class ModelData:
    task_times: np.ndarray
    production_level: int

    def __post_init__(self):
        times = np.asarray(self.task_times, dtype=float)
        if np.any(times < 0):
            raise ValueError("task times must be non-negative")
        if self.production_level < 0:
            raise ValueError("production level must be non-negative")
        object.__setattr__(self, "task_times", times)


def build_mean_model(models, per_model_precedence):
    """Production-weighted mean task times and the union precedence graph.

    Returns
    -------
    mean_times : ndarray of shape (T,)
    joint_precedence : tuple of (pred, succ) pairs, sorted
    """
    models = list(models)
    if not models:
        raise ValueError("at least one model is required")
    levels = np.array([m.production_level for m in models], dtype=float)
    if levels.sum() <= 0:
        raise ValueError("total production level must be positive")
    times = np.vstack([m.task_times for m in models])
    mean_times = levels @ times / levels.sum()

    joint = set()
    for relation in per_model_precedence:
        joint.update((int(a), int(b)) for a, b in relation)
    joint = tuple(sorted(joint))
    check_acyclic(times.shape[1], joint)
    return mean_times, joint


@dataclass
class BalancingInstance:
    mean_times: np.ndarray
    precedence: tuple
    zones: np.ndarray
    displacement: np.ndarray
    cycle_time: float
    max_workplaces: int = 3
    models: list = field(default_factory=list)

    def __post_init__(self):
        self.mean_times = np.asarray(self.mean_times, dtype=float)
        t = self.mean_times.size
        self.zones = np.asarray(self.zones, dtype=np.int64)
        self.displacement = np.asarray(self.displacement, dtype=float)
        self.precedence = tuple((int(a), int(b)) for a, b in self.precedence)
        if self.zones.shape != (t,):
            raise ValueError(f"expected {t} zones, got {self.zones.size}")
        z = self.displacement.shape[0]
        if self.displacement.shape != (z, z):
            raise ValueError("displacement matrix must be square")
        if np.any(self.zones < 1) or np.any(self.zones > z):
            raise ValueError(f"zones must lie in 1..{z}")
        if np.any(self.displacement < 0) or np.any(np.diag(self.displacement) != 0):
            raise ValueError("displacement times must be >= 0 with a zero diagonal")
        if self.max_workplaces < 1:
            raise ValueError("max_workplaces must be >= 1")
        if self.cycle_time <= 0:
            raise ValueError("cycle_time must be positive")
        for a, b in self.precedence:
            if not (1 <= a <= t and 1 <= b <= t):
                raise ValueError(f"precedence pair ({a}, {b}) references an unknown task")
        check_acyclic(t, self.precedence)
        preds = [[] for _ in range(t)]
        for a, b in self.precedence:
            preds[b - 1].append(a - 1)
        self._predecessors = [tuple(sorted(set(p))) for p in preds]

    @property
    def num_tasks(self) -> int:
        return self.mean_times.size

    @property
    def predecessors(self) -> list:
        """0-based predecessor tuples, one per task."""
        return self._predecessors

    def check_feasible(self) -> None:
        too_long = np.flatnonzero(self.mean_times > self.cycle_time)
        if too_long.size:
            j = too_long[0]
            raise InfeasibleTaskError(
                f"task {j + 1} needs {self.mean_times[j]:g} > cycle time {self.cycle_time:g}"
            )


@dataclass
class BalancingSolution:
    assignment: list               # per task: (workstation, workplace)
    workplace_tasks: list          # per workplace in line order: tuple of task ids
    workplace_loads: np.ndarray    # per workplace, displacement included
    workplace_stations: list       # per workplace: workstation index
    task_displacement: np.ndarray  # displacement time charged to each task
    num_workstations: int
    fitness: float

    @property
    def num_workplaces(self) -> int:
        return len(self.workplace_loads)

    def key(self) -> tuple:
        return tuple(self.workplace_tasks) + (tuple(self.workplace_stations),)


def balancing_objective(loads, cycle_time: float) -> float:
    """``K * sqrt(sum (C - t_k)^2)``; lower is better."""
    loads = np.asarray(loads, dtype=float)
    if loads.size == 0:
        raise ValueError("at least one workplace load is required")
    return loads.size * math.sqrt(float(np.sum((cycle_time - loads) ** 2)))


def decode_balancing(perm, instance: BalancingInstance) -> BalancingSolution:
    """Assign tasks to workstations/workplaces following ``perm``.

    Tasks are taken in permutation order, except that a task waits until
    all its predecessors are placed. Each task tries the opened
    workplaces of the current workstation in index order, then a new
    workplace (up to ``max_workplaces``), then closes the workstation.
    Within one workstation a task may follow a predecessor only on the
    same workplace. Moving between zones on a workplace adds the
    displacement time to the task that moves.
    """
    instance.check_feasible()
    order = check_permutation(perm, instance.num_tasks)
    return _decode(order, instance)


def _decode(order, instance: BalancingInstance) -> BalancingSolution:
    times = instance.mean_times
    zones = instance.zones - 1
    disp = instance.displacement
    cap = instance.cycle_time
    preds = instance.predecessors
    n = times.size

    station_of = [0] * n   # 0 = unassigned
    slot_of = [0] * n      # workplace index within its station (0-based)
    charged = np.zeros(n)
    remaining = [int(j) for j in order]
    zones = zones.tolist()

    station = 1
    loads: list[float] = []      # current station's workplaces
    last_zone: list[int] = []
    tasks: list[list[int]] = []
    closed_tasks, closed_loads, closed_stations = [], [], []

    def close_station():
        closed_tasks.extend(tuple(j + 1 for j in wp) for wp in tasks)
        closed_loads.extend(loads)
        closed_stations.extend([station] * len(loads))

    while remaining:
        for idx, j in enumerate(remaining):
            if all(station_of[p] for p in preds[j]):
                break
        del remaining[idx]

        local = {slot_of[p] for p in preds[j] if station_of[p] == station}
        target, cost = -1, 0.0
        for k in range(len(loads)):
            if local and local != {k}:
                continue
            move = disp[last_zone[k], zones[j]]
            if loads[k] + move + times[j] <= cap:
                target, cost = k, move
                break
        if target < 0 and len(loads) < instance.max_workplaces and not local:
            loads.append(0.0)
            last_zone.append(zones[j])
            tasks.append([])
            target = len(loads) - 1
        if target < 0:
            close_station()
            station += 1
            loads, last_zone, tasks = [0.0], [zones[j]], [[]]
            target = 0

        loads[target] += cost + times[j]
        last_zone[target] = zones[j]
        tasks[target].append(j)
        charged[j] = cost
        station_of[j] = station
        slot_of[j] = target
    close_station()

    wp_loads = np.array(closed_loads)
    return BalancingSolution(
        assignment=[(station_of[j], slot_of[j] + 1) for j in range(n)],
        workplace_tasks=closed_tasks,
        workplace_loads=wp_loads,
        workplace_stations=closed_stations,
        task_displacement=charged,
        num_workstations=station,
        fitness=-balancing_objective(wp_loads, cap),
    )


def balancing_fitness(perm, instance: BalancingInstance) -> float:
    """Maximization-canonical balancing score (negated objective)."""
    try:
        return decode_balancing(perm, instance).fitness
    except InfeasibleTaskError:
        return INFEASIBLE_FITNESS


class BalancingProblem:
    """Fitness and archive key over random-keys positions, with a decode cache."""

    def __init__(self, instance: BalancingInstance, cache_size: int = 200_000):
        self.instance = instance
        try:
            instance.check_feasible()
            self.feasible = True
        except InfeasibleTaskError:
            self.feasible = False
        self._decode = lru_cache(maxsize=cache_size)(self._decode_order)

    @property
    def dimensions(self) -> int:
        return self.instance.num_tasks

    def _decode_order(self, order: bytes) -> BalancingSolution:
        ranks = np.empty(self.dimensions, dtype=np.int64)
        ranks[np.frombuffer(order, dtype=np.intp)] = np.arange(self.dimensions)
        return _decode(ranks, self.instance)

    def decode(self, position) -> BalancingSolution:
        """Balance encoded by ``position`` (random keys), cached."""
        if not self.feasible:
            self.instance.check_feasible()
        position = np.asarray(position, dtype=float)
        if position.shape != (self.dimensions,):
            raise ValueError(f"expected a position of length {self.dimensions}")
        return self._decode(np.argsort(position, kind="stable").tobytes())

    def __call__(self, position) -> float:
        if not self.feasible:
            return INFEASIBLE_FITNESS
        return self.decode(position).fitness

    def key(self, position) -> tuple:
        return self.decode(position).key()
