"""Balance first, keep the n best distinct balances, sequence each, pick the best pair."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from .balancing import BalancingInstance, BalancingProblem, BalancingSolution
from .sequencing import (SequenceEvaluation, SequencingProblem, derive_process_times,
                         evaluate_sequence)
from .swarm import FssConfig, PsoConfig, SearchResult, Variant, run_search

ALGORITHMS = ("fss-v", "fss-sar", "fss-npss-sar", "pso")
_VARIANTS = {"fss-v": Variant.VANILLA, "fss-sar": Variant.SAR, "fss-npss-sar": Variant.NPSS_SAR}


def make_search_config(algorithm: str, iterations: int = 1000, population: int = 30,
                       seed: int = 0, **options) -> Union[FssConfig, PsoConfig]:
    """Build the optimizer config for one of ``ALGORITHMS``.

    Extra keyword options are passed to the config if it has a field of
    that name and silently dropped otherwise, so one option dict can
    serve both FSS and PSO.
    """
    if algorithm == "pso":
        cls, base = PsoConfig, {"swarm_size": population}
    elif algorithm in _VARIANTS:
        cls, base = FssConfig, {"school_size": population, "variant": _VARIANTS[algorithm]}
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    names = {f.name for f in dataclasses.fields(cls)}
    extra = {k: v for k, v in options.items() if k in names and v is not None}
    return cls(max_iterations=iterations, rng_seed=seed, **base, **extra)


class SelectionMetric(str, Enum):
    COMPLETED_WORK = "completed_work"
    CW_WL_RATIO = "cw_wl_ratio"


@dataclass
class PipelineConfig:
    balancing_search: Union[FssConfig, PsoConfig] = field(default_factory=FssConfig)
    sequencing_search: Union[FssConfig, PsoConfig] = field(default_factory=FssConfig)
    archive_n: int = 10
    selection_metric: SelectionMetric = SelectionMetric.COMPLETED_WORK
    station_length: float = 0.95

    def __post_init__(self):
        self.selection_metric = SelectionMetric(self.selection_metric)
        if self.archive_n < 1:
            raise ValueError("archive_n must be >= 1")


@dataclass
class CombinedSolution:
    balance: BalancingSolution
    sequence: np.ndarray
    evaluation: SequenceEvaluation
    completed_work: float
    workload: float
    cw_wl_ratio: float
    iuc_balancing: int
    iuc_sequencing: int


@dataclass
class CandidateRecord:
    index: int
    balancing_fitness: float
    num_workplaces: int
    completed_work: float
    workload: float
    cw_wl_ratio: float
    iuc_sequencing: int


@dataclass
class PipelineReport:
    solution: CombinedSolution
    candidates: list
    balancing_result: SearchResult


def solve_balancing_topn(instance: BalancingInstance, config, n: int):
    """Run the optimizer over random keys and return up to ``n`` distinct balances.

    Returns the balances (best first) and the raw search result.
    Raises :class:`~fishline.balancing.InfeasibleTaskError` for an
    instance with a task longer than the cycle time.
    """
    instance.check_feasible()
    problem = BalancingProblem(instance)
    result = run_search(config, problem, problem.dimensions, archive_size=n,
                        archive_key=problem.key)
    balances = [problem.decode(pos) for pos, _ in result.archive]
    return balances, result


def solve_sequencing_for(balance: BalancingSolution, instance: BalancingInstance, config,
                         station_length: float = 0.95):
    """Best model sequence for one balance.

    Returns ``(sequence, evaluation, iuc)``.
    """
    seq_instance = derive_process_times(balance, instance, station_length)
    problem = SequencingProblem(seq_instance)
    result = run_search(config, problem, problem.dimensions)
    sequence = problem.decode(result.best_position)
    return sequence, evaluate_sequence(sequence, seq_instance), result.iterations_until_convergence


def _metric(evaluation: SequenceEvaluation, metric: SelectionMetric) -> float:
    if metric is SelectionMetric.CW_WL_RATIO:
        return evaluation.ratio
    return evaluation.total_completed_work


def run_simultaneous(instance: BalancingInstance, config: PipelineConfig) -> PipelineReport:
    balances, bal_result = solve_balancing_topn(instance, config.balancing_search, config.archive_n)

    base_seed = config.sequencing_search.rng_seed
    best, best_score, candidates = None, -np.inf, []
    for index, balance in enumerate(balances):
        seq_config = dataclasses.replace(config.sequencing_search, rng_seed=base_seed + index)
        sequence, evaluation, iuc = solve_sequencing_for(balance, instance, seq_config,
                                                         config.station_length)
        candidates.append(CandidateRecord(
            index=index,
            balancing_fitness=balance.fitness,
            num_workplaces=balance.num_workplaces,
            completed_work=evaluation.total_completed_work,
            workload=evaluation.total_workload,
            cw_wl_ratio=evaluation.ratio,
            iuc_sequencing=iuc,
        ))
        score = _metric(evaluation, config.selection_metric)
        if score > best_score:
            best_score = score
            best = CombinedSolution(
                balance=balance,
                sequence=sequence,
                evaluation=evaluation,
                completed_work=evaluation.total_completed_work,
                workload=evaluation.total_workload,
                cw_wl_ratio=evaluation.ratio,
                iuc_balancing=bal_result.iterations_until_convergence,
                iuc_sequencing=iuc,
            )
    return PipelineReport(solution=best, candidates=candidates, balancing_result=bal_result)
