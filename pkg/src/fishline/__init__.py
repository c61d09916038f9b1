"""Fish School Search and constriction PSO for mixed-model line balancing and sequencing."""

from .balancing import (BalancingInstance, BalancingSolution, InfeasibleTaskError, ModelData,
                        PrecedenceCycleError, balancing_fitness, balancing_objective,
                        build_mean_model, decode_balancing)
from .encoding import (MultipleRandomKeysEncoder, RandomKeysEncoder,
                       multiple_random_keys_decode, random_keys_decode)
from .estimators import ConstrictionPSO, FishSchoolSearch, SimultaneousSolver
from .pipeline import (PipelineConfig, run_simultaneous, solve_balancing_topn,
                       solve_sequencing_for)
from .sequencing import (SequencingInstance, completed_work, derive_process_times,
                         evaluate_sequence, sequencing_fitness)
from .swarm import FssConfig, PsoConfig, SearchResult, Variant, run_search

__version__ = "0.1.0"

__all__ = [
    "BalancingInstance", "BalancingSolution", "ConstrictionPSO", "FishSchoolSearch",
    "FssConfig", "InfeasibleTaskError", "ModelData", "MultipleRandomKeysEncoder",
    "PipelineConfig", "PrecedenceCycleError", "PsoConfig", "RandomKeysEncoder",
    "SearchResult", "SequencingInstance", "SimultaneousSolver", "Variant",
    "balancing_fitness", "balancing_objective", "build_mean_model", "completed_work",
    "decode_balancing", "derive_process_times", "evaluate_sequence",
    "multiple_random_keys_decode", "random_keys_decode", "run_search", "run_simultaneous",
    "sequencing_fitness", "solve_balancing_topn", "solve_sequencing_for",
]
