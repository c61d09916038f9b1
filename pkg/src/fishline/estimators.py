"""scikit-learn style front-ends.

The optimizers follow the estimator conventions (constructor holds only
hyper-parameters, ``get_params``/``set_params``/``clone`` work, fitted
state ends in ``_``) but ``fit`` takes an objective function instead of
a data matrix.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .balancing import BalancingInstance
from .pipeline import ALGORITHMS, PipelineConfig, make_search_config, run_simultaneous
from .swarm import FssConfig, PsoConfig, Variant, run_search


class _SwarmOptimizer(BaseEstimator):

    def _config(self):
        raise NotImplementedError

    def fit(self, fitness, n_dims: int, minimize: bool = False, archive_size: int = 1,
            archive_key=None):
        """Optimize ``fitness`` over ``n_dims`` dimensions.

        ``best_value_`` is reported in the caller's sense (minimized value
        when ``minimize=True``); ``result_`` keeps the internal
        maximization-sense record.
        """
        if not callable(fitness):
            raise TypeError("fitness must be callable")
        objective = (lambda x: -fitness(x)) if minimize else fitness
        self.result_ = run_search(self._config(), objective, int(n_dims), archive_size, archive_key)
        self.best_position_ = self.result_.best_position
        sign = -1.0 if minimize else 1.0
        self.best_value_ = sign * self.result_.best_fitness
        self.history_ = sign * self.result_.fitness_history
        self.n_iter_until_convergence_ = self.result_.iterations_until_convergence
        return self


class FishSchoolSearch(_SwarmOptimizer):
    """Fish School Search (vanilla, SAR or NPSS-SAR).

    Parameters
    ----------
    variant : {"vanilla", "sar", "npss-sar"}
    school_size : int
    max_iter : int
    w_scale : float
        Upper weight bound; weights start at ``w_scale / 2``.
    step_ind, step_vol : float
        Initial steps as a fraction of the search-space width.
    sar_alpha0, sar_decay : float
        Worsening-acceptance probability ``sar_alpha0 * exp(-sar_decay * t)``.
    bounds : tuple of float
    random_state : int
    """

    def __init__(self, variant="vanilla", school_size=30, max_iter=1000, w_scale=10000.0,
                 step_ind=0.2, step_vol=0.2, sar_alpha0=0.8, sar_decay=0.007,
                 iuc_threshold=1e-4, bounds=(-1000.0, 1000.0), random_state=0):
        self.variant = variant
        self.school_size = school_size
        self.max_iter = max_iter
        self.w_scale = w_scale
        self.step_ind = step_ind
        self.step_vol = step_vol
        self.sar_alpha0 = sar_alpha0
        self.sar_decay = sar_decay
        self.iuc_threshold = iuc_threshold
        self.bounds = bounds
        self.random_state = random_state

    def _config(self):
        return FssConfig(
            school_size=self.school_size,
            max_iterations=self.max_iter,
            w_scale=self.w_scale,
            step_ind_initial_fraction=self.step_ind,
            step_vol_initial_fraction=self.step_vol,
            variant=Variant(self.variant),
            sar_alpha0=self.sar_alpha0,
            sar_decay_rate=self.sar_decay,
            rng_seed=self.random_state,
            iuc_threshold=self.iuc_threshold,
            lower_bound=self.bounds[0],
            upper_bound=self.bounds[1],
        )


class ConstrictionPSO(_SwarmOptimizer):
    """Particle swarm with the constriction factor; needs ``c1 + c2 >= 4``."""

    def __init__(self, swarm_size=30, max_iter=1000, c1=2.1, c2=2.1, iuc_threshold=1e-4,
                 bounds=(-1000.0, 1000.0), random_state=0):
        self.swarm_size = swarm_size
        self.max_iter = max_iter
        self.c1 = c1
        self.c2 = c2
        self.iuc_threshold = iuc_threshold
        self.bounds = bounds
        self.random_state = random_state

    def _config(self):
        return PsoConfig(
            swarm_size=self.swarm_size,
            max_iterations=self.max_iter,
            c1=self.c1,
            c2=self.c2,
            rng_seed=self.random_state,
            iuc_threshold=self.iuc_threshold,
            lower_bound=self.bounds[0],
            upper_bound=self.bounds[1],
        )


class SimultaneousSolver(BaseEstimator):
    """Balance and sequence a mixed-model line in one go.

    ``fit`` takes a :class:`~fishline.balancing.BalancingInstance` whose
    ``models`` carry per-model task times and production levels. The same
    algorithm and budget drive both stages unless ``sequencing_algorithm``
    is given. After fitting, ``solution_`` holds the selected
    balance/sequence pair and ``report_`` every evaluated candidate.
    """

    def __init__(self, algorithm="fss-sar", sequencing_algorithm=None, max_iter=1000,
                 population=30, archive_n=10, station_length=0.95,
                 selection_metric="completed_work", w_scale=10000.0, step_ind=0.2,
                 step_vol=0.2, sar_alpha0=0.8, sar_decay=0.007, c1=2.1, c2=2.1,
                 random_state=0):
        self.algorithm = algorithm
        self.sequencing_algorithm = sequencing_algorithm
        self.max_iter = max_iter
        self.population = population
        self.archive_n = archive_n
        self.station_length = station_length
        self.selection_metric = selection_metric
        self.w_scale = w_scale
        self.step_ind = step_ind
        self.step_vol = step_vol
        self.sar_alpha0 = sar_alpha0
        self.sar_decay = sar_decay
        self.c1 = c1
        self.c2 = c2
        self.random_state = random_state

    def _search_config(self, algorithm):
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
        return make_search_config(
            algorithm, self.max_iter, self.population, self.random_state,
            w_scale=self.w_scale,
            step_ind_initial_fraction=self.step_ind,
            step_vol_initial_fraction=self.step_vol,
            sar_alpha0=self.sar_alpha0,
            sar_decay_rate=self.sar_decay,
            c1=self.c1,
            c2=self.c2,
        )

    def fit(self, instance: BalancingInstance, y=None):
        if not isinstance(instance, BalancingInstance):
            raise TypeError("fit expects a BalancingInstance")
        config = PipelineConfig(
            balancing_search=self._search_config(self.algorithm),
            sequencing_search=self._search_config(self.sequencing_algorithm or self.algorithm),
            archive_n=self.archive_n,
            selection_metric=self.selection_metric,
            station_length=self.station_length,
        )
        self.report_ = run_simultaneous(instance, config)
        self.solution_ = self.report_.solution
        self.candidates_ = self.report_.candidates
        return self

    def predict(self, instance=None):
        """The chosen model sequence (1-based model indices)."""
        check_is_fitted(self, "solution_")
        return np.asarray(self.solution_.sequence)

    def score(self, instance=None, y=None) -> float:
        check_is_fitted(self, "solution_")
        return self.solution_.completed_work
