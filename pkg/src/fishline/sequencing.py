"""Mixed-model sequencing on a paced line with closed stations.

All times are in cycle-time units: job ``i`` (0-based) enters every
workplace at time ``i`` and leaves it at ``i + L``. Work not finished by
then is left to utility workers and is lost from the completed-work count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from ._validation import check_production_levels
from .balancing import BalancingInstance, BalancingSolution
from .encoding import multiple_random_keys_decode


@dataclass
class SequencingInstance:
    process_times: np.ndarray   # (models, workplaces)
    production_levels: np.ndarray
    station_length: float = 0.95

    def __post_init__(self):
        self.process_times = np.atleast_2d(np.asarray(self.process_times, dtype=float))
        self.production_levels = check_production_levels(self.production_levels)
        if self.process_times.shape[0] != self.production_levels.size:
            raise ValueError("one row of process times is required per model")
        if np.any(self.process_times < 0):
            raise ValueError("process times must be non-negative")
        if not self.station_length > 0:
            raise ValueError("station_length must be positive")

    @property
    def num_workplaces(self) -> int:
        return self.process_times.shape[1]

    @property
    def num_jobs(self) -> int:
        return int(self.production_levels.sum())

    @property
    def total_workload(self) -> float:
        return float(self.production_levels @ self.process_times.sum(axis=1))


@dataclass
class SequenceEvaluation:
    start: np.ndarray
    finish: np.ndarray
    completed: np.ndarray
    total_completed_work: float
    total_workload: float

    @property
    def ratio(self) -> float:
        return self.total_completed_work / self.total_workload if self.total_workload > 0 else 1.0


def derive_process_times(balancing: BalancingSolution, instance: BalancingInstance,
                         station_length: float = 0.95) -> SequencingInstance:
    """Per-model workplace times, in cycle units, for a given balance.

    Each workplace is charged every model's task times for the tasks it
    holds, plus the displacement times fixed by the balance.
    """
    models = instance.models
    if not models:
        raise ValueError("instance carries no model data")
    p = np.zeros((len(models), balancing.num_workplaces))
    for k, wp_tasks in enumerate(balancing.workplace_tasks):
        idx = np.asarray(wp_tasks, dtype=np.int64) - 1
        moves = balancing.task_displacement[idx].sum()
        for m, model in enumerate(models):
            p[m, k] = model.task_times[idx].sum() + moves
    return SequencingInstance(
        process_times=p / instance.cycle_time,
        production_levels=[m.production_level for m in models],
        station_length=station_length,
    )


@numba.njit(cache=True)
def _recursion(sequence, p, L, start, finish, completed):
    n = sequence.shape[0]
    for k in range(p.shape[1]):
        prev_finish = 0.0
        for i in range(n):
            work = p[sequence[i], k]
            s = max(float(i), prev_finish) if i > 0 else 0.0
            border = i + L
            f = min(s + work, border)
            v = min(work, border - s)
            start[i, k] = s
            finish[i, k] = f
            completed[i, k] = v if v > 0.0 else 0.0
            prev_finish = f


@numba.njit(cache=True)
def _completed_work(sequence, p, L):
    total = 0.0
    n = sequence.shape[0]
    for k in range(p.shape[1]):
        prev_finish = 0.0
        for i in range(n):
            work = p[sequence[i], k]
            s = max(float(i), prev_finish) if i > 0 else 0.0
            border = i + L
            v = min(work, border - s)
            if v > 0.0:
                total += v
            prev_finish = min(s + work, border)
    return total


def _check_sequence(seq, inst: SequencingInstance) -> np.ndarray:
    seq = np.asarray(seq, dtype=np.int64)
    levels = inst.production_levels
    if seq.ndim != 1 or np.any(seq < 1) or np.any(seq > levels.size):
        raise ValueError(f"sequence entries must be model indices 1..{levels.size}")
    if np.any(np.bincount(seq - 1, minlength=levels.size) != levels):
        raise ValueError("sequence does not match the production levels")
    return seq - 1


def evaluate_sequence(seq, inst: SequencingInstance) -> SequenceEvaluation:
    """Start, finish and completed work of every job at every workplace."""
    zero_based = _check_sequence(seq, inst)
    shape = (zero_based.size, inst.num_workplaces)
    start, finish, completed = np.empty(shape), np.empty(shape), np.empty(shape)
    _recursion(zero_based, inst.process_times, float(inst.station_length), start, finish, completed)
    workload = float(inst.process_times[zero_based].sum())
    return SequenceEvaluation(start, finish, completed, float(completed.sum()), workload)


def completed_work(evaluation: SequenceEvaluation) -> float:
    return float(evaluation.completed.sum())


def sequencing_fitness(position, inst: SequencingInstance) -> float:
    seq = multiple_random_keys_decode(position, inst.production_levels)
    return float(_completed_work(seq - 1, inst.process_times, float(inst.station_length)))


class SequencingProblem:
    """Completed-work fitness over multiple-random-keys positions."""

    def __init__(self, inst: SequencingInstance):
        self.inst = inst
        self._levels = inst.production_levels
        self._models = np.repeat(np.arange(self._levels.size), self._levels)
        self._p = np.ascontiguousarray(inst.process_times)
        self._L = float(inst.station_length)

    @property
    def dimensions(self) -> int:
        return int(self._levels.sum())

    def decode(self, position) -> np.ndarray:
        return multiple_random_keys_decode(position, self._levels)

    def __call__(self, position) -> float:
        # same mapping as multiple_random_keys_decode, minus the checks
        seq = np.empty(self._models.size, dtype=np.int64)
        seq[np.argsort(position, kind="stable")] = self._models
        return float(_completed_work(seq, self._p, self._L))

    def key(self, position) -> bytes:
        return self.decode(position).tobytes()
