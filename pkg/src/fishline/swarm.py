"""Continuous swarm optimizers: Fish School Search variants and constriction PSO.

Every optimizer here *maximizes*. Wrap a minimization objective as its
negation (the estimators in :mod:`fishline.estimators` do this for you).

The school is stored column-wise (one array per fish attribute) so the
operators are vectorized over fish; each operator still applies the
per-fish rule independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Hashable, Optional, Union

import numpy as np

FitnessFn = Callable[[np.ndarray], float]
KeyFn = Callable[[np.ndarray], Hashable]


class Variant(str, Enum):
    VANILLA = "vanilla"
    SAR = "sar"
    NPSS_SAR = "npss-sar"


@dataclass(frozen=True)
class SearchSpace:
    """Box ``[lower_bound, upper_bound]^dimensions``."""

    dimensions: int
    lower_bound: float = -1000.0
    upper_bound: float = 1000.0

    def __post_init__(self):
        if self.dimensions < 1:
            raise ValueError(f"dimensions must be >= 1, got {self.dimensions}")
        if not self.lower_bound < self.upper_bound:
            raise ValueError(
                f"lower_bound ({self.lower_bound}) must be < upper_bound ({self.upper_bound})"
            )

    @property
    def width(self) -> float:
        return self.upper_bound - self.lower_bound

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower_bound, self.upper_bound)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower_bound, self.upper_bound, size=(n, self.dimensions))


@dataclass
class FssConfig:
    school_size: int = 30
    max_iterations: int = 1000
    w_scale: float = 10000.0
    step_ind_initial_fraction: float = 0.2
    step_vol_initial_fraction: float = 0.2
    variant: Variant = Variant.VANILLA
    sar_alpha0: float = 0.8
    sar_decay_rate: float = 0.007
    rng_seed: int = 0
    iuc_threshold: float = 1e-4
    lower_bound: float = -1000.0
    upper_bound: float = 1000.0

    def __post_init__(self):
        self.variant = Variant(self.variant)
        if self.school_size < 1:
            raise ValueError("school_size must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not self.w_scale > 1:
            raise ValueError("w_scale must be > 1")
        for name in ("step_ind_initial_fraction", "step_vol_initial_fraction"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {value}")
        if not 0 <= self.sar_alpha0 <= 1:
            raise ValueError("sar_alpha0 must lie in [0, 1]")


@dataclass
class PsoConfig:
    swarm_size: int = 30
    max_iterations: int = 1000
    c1: float = 2.1
    c2: float = 2.1
    rng_seed: int = 0
    iuc_threshold: float = 1e-4
    lower_bound: float = -1000.0
    upper_bound: float = 1000.0
    # False: the global best is refreshed after every particle move;
    # True: once per sweep, after the whole swarm has moved
    synchronous: bool = False

    def __post_init__(self):
        if self.swarm_size < 1:
            raise ValueError("swarm_size must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.c1 + self.c2 < 4:
            raise ValueError(f"c1 + c2 must be >= 4 for constriction, got {self.c1 + self.c2}")


SearchConfig = Union[FssConfig, PsoConfig]


@dataclass
class School:
    """Fish school state, one row per fish.

    ``success_displacement``/``success_step`` hold the last *improving*
    individual move of each fish and the step size it was taken with
    (``success_step == 0`` means the fish never improved).
    """

    positions: np.ndarray
    fitness: np.ndarray
    weights: np.ndarray
    last_displacement: np.ndarray
    last_fitness_delta: np.ndarray
    last_weight_delta: np.ndarray
    improved: np.ndarray
    success_displacement: np.ndarray
    success_step: np.ndarray

    @classmethod
    def create(cls, positions, fitness, initial_weight: float) -> "School":
        positions = np.array(positions, dtype=float, ndmin=2)
        n = positions.shape[0]
        return cls(
            positions=positions,
            fitness=np.asarray(fitness, dtype=float).reshape(n).copy(),
            weights=np.full(n, float(initial_weight)),
            last_displacement=np.zeros_like(positions),
            last_fitness_delta=np.zeros(n),
            last_weight_delta=np.zeros(n),
            improved=np.zeros(n, dtype=bool),
            success_displacement=np.zeros_like(positions),
            success_step=np.zeros(n),
        )

    def __len__(self):
        return self.positions.shape[0]


@dataclass
class Swarm:
    positions: np.ndarray
    velocities: np.ndarray
    personal_best_positions: np.ndarray
    personal_best_fitness: np.ndarray


@dataclass
class SearchResult:
    best_position: np.ndarray
    best_fitness: float
    iterations_until_convergence: int
    fitness_history: np.ndarray
    archive: list = field(default_factory=list)
    evaluations: int = 0


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------

def step_schedule(initial: float, t: int, it_max: int) -> float:
    """Linearly decayed step: ``initial`` at t=0, exactly 0 at ``it_max``."""
    if it_max <= 0:
        raise ValueError("it_max must be positive")
    return max(0.0, initial * (1.0 - t / it_max))


def sar_alpha(t: int, alpha0: float = 0.8, rate: float = 0.007) -> float:
    """Probability of accepting a worsening individual move at iteration ``t``."""
    return alpha0 * math.exp(-rate * t)


def constriction_factor(c1: float, c2: float) -> float:
    phi = c1 + c2
    if phi < 4:
        raise ValueError(f"c1 + c2 must be >= 4, got {phi}")
    return 2.0 / abs(2.0 - phi - math.sqrt(phi * (phi - 4.0)))


# ---------------------------------------------------------------------------
# FSS operators
# ---------------------------------------------------------------------------

def individual_movement(school: School, step_ind: float, alpha: float,
                        evaluate: FitnessFn, space: SearchSpace,
                        rng, accept_rng=None) -> None:
    """Local random move of every fish, kept only if it improves fitness.

    With ``alpha > 0`` a non-improving candidate is still accepted when a
    uniform draw falls below ``alpha``. Such moves are recorded as the
    fish's displacement but do not set ``improved``. Draws for the
    acceptance test come from ``accept_rng`` (defaults to ``rng``) and are
    only taken when ``alpha > 0``.
    """
    n, d = school.positions.shape
    candidates = space.clip(school.positions + rng.uniform(-1.0, 1.0, size=(n, d)) * step_ind)
    cand_fitness = np.array([evaluate(c) for c in candidates], dtype=float)

    improved = cand_fitness > school.fitness
    accepted = improved.copy()
    if alpha > 0:
        draws = (rng if accept_rng is None else accept_rng).random(n)
        accepted |= draws < alpha

    displacement = np.where(accepted[:, None], candidates - school.positions, 0.0)
    school.last_displacement = displacement
    school.last_fitness_delta = np.where(accepted, cand_fitness - school.fitness, 0.0)
    school.improved = improved
    school.positions = np.where(accepted[:, None], candidates, school.positions)
    school.fitness = np.where(accepted, cand_fitness, school.fitness)
    school.success_displacement[improved] = displacement[improved]
    school.success_step[improved] = step_ind


def feed_vanilla(school: School, w_scale: float) -> None:
    old = school.weights
    max_gain = np.max(np.abs(school.last_fitness_delta))
    if max_gain > 0:
        new = np.clip(old + school.last_fitness_delta / max_gain, 1.0, w_scale)
    else:
        new = old.copy()
    school.last_weight_delta = new - old
    school.weights = new


def feed_npss(school: School, w_scale: float, f_min: float, f_max: float) -> None:
    """Absolute weights from the fitness range seen over the whole search."""
    old = school.weights
    if f_max > f_min:
        ratio = (school.fitness - f_min) / (f_max - f_min)
        new = np.clip(1.0 + (w_scale - 1.0) * ratio, 1.0, w_scale)
    else:
        new = np.full_like(old, 1.0 + (w_scale - 1.0) / 2.0)
    school.last_weight_delta = new - old
    school.weights = new


def npss_fake_contribution(school: School, step_vol: float, max_weight_delta: float,
                           w_scale: float) -> tuple[np.ndarray, np.ndarray]:
    """Stand-in displacement and weight gain for every fish.

    Only meaningful for fish that did not improve this iteration; the
    caller picks those rows. Fish that never improved get zeros.
    """
    moved = school.success_step > 0
    displacement = np.zeros_like(school.success_displacement)
    displacement[moved] = (step_vol * school.success_displacement[moved]
                           / school.success_step[moved, None])
    weight_gain = np.where(moved, max_weight_delta * (school.weights - 1.0) / (w_scale - 1.0), 0.0)
    return displacement, weight_gain


def instinctive_vector(school: School, variant: Variant, step_vol: float = 0.0,
                       w_scale: float = 2.0) -> np.ndarray:
    variant = Variant(variant)
    if variant is Variant.NPSS_SAR:
        improved = school.improved
        gains = school.last_weight_delta
        best_gain = max(float(gains[improved].max()), 0.0) if improved.any() else 0.0
        fake_dx, fake_dw = npss_fake_contribution(school, step_vol, best_gain, w_scale)
        displacement = np.where(improved[:, None], school.last_displacement, fake_dx)
        coef = np.where(improved, gains, fake_dw)
    elif variant is Variant.SAR:
        displacement = school.last_displacement
        coef = np.where(school.improved, school.last_fitness_delta, 0.0)
    else:
        displacement = school.last_displacement
        coef = school.last_fitness_delta

    denominator = coef.sum()
    if denominator == 0:
        return np.zeros(school.positions.shape[1])
    return (displacement * coef[:, None]).sum(axis=0) / denominator


def collective_instinctive(school: School, variant: Variant, space: SearchSpace,
                           step_vol: float = 0.0, w_scale: float = 2.0) -> np.ndarray:
    """Shift the whole school by the success-weighted mean displacement."""
    drift = instinctive_vector(school, variant, step_vol, w_scale)
    school.positions = space.clip(school.positions + drift)
    return drift


def compute_barycenter(positions: np.ndarray, weights: np.ndarray) -> np.ndarray:
    positions = np.asarray(positions, dtype=float)
    weights = np.asarray(weights, dtype=float)
    return (positions * weights[:, None]).sum(axis=0) / weights.sum()


def collective_volitive(school: School, step_vol: float, total_weight_prev: float,
                        space: SearchSpace, rng) -> float:
    """Contract toward the barycenter if the school gained weight, else expand.

    Returns the current total weight, to be passed in on the next call.
    """
    barycenter = compute_barycenter(school.positions, school.weights)
    total = float(school.weights.sum())
    sign = -1.0 if total > total_weight_prev else 1.0

    offset = school.positions - barycenter
    distance = np.linalg.norm(offset, axis=1)
    draws = rng.random(len(school))
    away = distance > 0
    unit = np.zeros_like(offset)
    unit[away] = offset[away] / distance[away, None]
    school.positions = space.clip(school.positions + sign * step_vol * draws[:, None] * unit)
    return total


# ---------------------------------------------------------------------------
# PSO
# ---------------------------------------------------------------------------

def _constricted_velocity(x, v, pb, gb, chi, c1, c2, r1, r2):
    return chi * (v + c1 * r1 * (pb - x) + c2 * r2 * (gb - x))


def pso_update(swarm: Swarm, global_best: np.ndarray, c1: float, c2: float,
               space: SearchSpace, rng) -> None:
    """Move every particle against one fixed global best (fitness evaluation is separate)."""
    chi = constriction_factor(c1, c2)
    x = swarm.positions
    swarm.velocities = _constricted_velocity(x, swarm.velocities, swarm.personal_best_positions,
                                             np.asarray(global_best), chi, c1, c2,
                                             rng.random(x.shape), rng.random(x.shape))
    swarm.positions = space.clip(x + swarm.velocities)


# ---------------------------------------------------------------------------
# search loop
# ---------------------------------------------------------------------------

class SolutionArchive:
    """Keeps the ``capacity`` best solutions that are distinct under ``key``.

    Ties in fitness favour the earlier discovery.
    """

    def __init__(self, capacity: int, key: Optional[KeyFn] = None):
        if capacity < 1:
            raise ValueError("archive capacity must be >= 1")
        self.capacity = capacity
        self.key = key if key is not None else (lambda x: x.tobytes())
        self._entries: dict = {}  # key -> (fitness, order, position)
        self._counter = 0
        self._threshold = -np.inf

    def _worst(self):
        return min(self._entries.items(), key=lambda kv: (kv[1][0], -kv[1][1]))

    def _refresh(self):
        full = len(self._entries) >= self.capacity
        self._threshold = self._worst()[1][0] if full else -np.inf

    def offer(self, position: np.ndarray, fitness: float) -> None:
        self._counter += 1
        if fitness <= self._threshold:
            return
        k = self.key(position)
        existing = self._entries.get(k)
        if existing is not None:
            if fitness > existing[0]:
                self._entries[k] = (fitness, existing[1], np.array(position, dtype=float))
                self._refresh()
            return
        if len(self._entries) >= self.capacity:
            del self._entries[self._worst()[0]]
        self._entries[k] = (fitness, self._counter, np.array(position, dtype=float))
        self._refresh()

    def items(self) -> list[tuple[np.ndarray, float]]:
        ranked = sorted(self._entries.values(), key=lambda e: (-e[0], e[1]))
        return [(pos, fit) for fit, _, pos in ranked]


class _Tracker:
    """Wraps the fitness function: best-so-far, fitness range, archive, IUC."""

    def __init__(self, fitness_fn: FitnessFn, archive: SolutionArchive, threshold: float):
        self.fitness_fn = fitness_fn
        self.archive = archive
        self.threshold = threshold
        self.best_fitness = -np.inf
        self.best_position = None
        self.f_min = np.inf
        self.f_max = -np.inf
        self.evaluations = 0
        self.history: list[float] = []
        self.iuc = 0

    def __call__(self, x: np.ndarray) -> float:
        f = float(self.fitness_fn(x))
        self.evaluations += 1
        if f > self.best_fitness:
            self.best_fitness = f
            self.best_position = np.array(x, dtype=float)
        self.f_min = min(self.f_min, f)
        self.f_max = max(self.f_max, f)
        self.archive.offer(x, f)
        return f

    def end_iteration(self, t: int) -> None:
        if self.history and self.best_fitness - self.history[-1] > self.threshold:
            self.iuc = t
        self.history.append(self.best_fitness)

    def result(self) -> SearchResult:
        return SearchResult(
            best_position=self.best_position,
            best_fitness=self.best_fitness,
            iterations_until_convergence=self.iuc,
            fitness_history=np.array(self.history),
            archive=self.archive.items(),
            evaluations=self.evaluations,
        )


def _streams(seed: int, n: int) -> list[np.random.Generator]:
    # independent streams so that skipping one kind of draw never shifts another
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def run_fss(config: FssConfig, fitness_fn: FitnessFn, dimensions: int,
            archive_size: int = 1, archive_key: Optional[KeyFn] = None) -> SearchResult:
    space = SearchSpace(dimensions, config.lower_bound, config.upper_bound)
    init_rng, move_rng, accept_rng, vol_rng = _streams(config.rng_seed, 4)
    tracker = _Tracker(fitness_fn, SolutionArchive(archive_size, archive_key), config.iuc_threshold)

    positions = space.sample(config.school_size, init_rng)
    school = School.create(positions, [tracker(x) for x in positions], config.w_scale / 2.0)
    tracker.end_iteration(0)

    it_max = config.max_iterations
    step_ind0 = config.step_ind_initial_fraction * space.width
    step_vol0 = config.step_vol_initial_fraction * space.width
    uses_sar = config.variant in (Variant.SAR, Variant.NPSS_SAR)
    total_weight = float(school.weights.sum())

    for t in range(it_max):
        step_ind = step_schedule(step_ind0, t, it_max)
        step_vol = step_schedule(step_vol0, t, it_max)
        alpha = sar_alpha(t, config.sar_alpha0, config.sar_decay_rate) if uses_sar else 0.0

        individual_movement(school, step_ind, alpha, tracker, space, move_rng, accept_rng)
        if config.variant is Variant.NPSS_SAR:
            feed_npss(school, config.w_scale, tracker.f_min, tracker.f_max)
        else:
            feed_vanilla(school, config.w_scale)
        collective_instinctive(school, config.variant, space, step_vol, config.w_scale)
        total_weight = collective_volitive(school, step_vol, total_weight, space, vol_rng)

        school.fitness = np.array([tracker(x) for x in school.positions])
        tracker.end_iteration(t + 1)

    return tracker.result()


def run_pso(config: PsoConfig, fitness_fn: FitnessFn, dimensions: int,
            archive_size: int = 1, archive_key: Optional[KeyFn] = None) -> SearchResult:
    space = SearchSpace(dimensions, config.lower_bound, config.upper_bound)
    init_rng, move_rng = _streams(config.rng_seed, 2)
    tracker = _Tracker(fitness_fn, SolutionArchive(archive_size, archive_key), config.iuc_threshold)

    positions = space.sample(config.swarm_size, init_rng)
    fitness = np.array([tracker(x) for x in positions])
    swarm = Swarm(positions, np.zeros_like(positions), positions.copy(), fitness)
    tracker.end_iteration(0)
    chi = constriction_factor(config.c1, config.c2)

    for t in range(config.max_iterations):
        if config.synchronous:
            global_best = swarm.personal_best_positions[np.argmax(swarm.personal_best_fitness)]
            pso_update(swarm, global_best, config.c1, config.c2, space, move_rng)
            fitness = np.array([tracker(x) for x in swarm.positions])
            better = fitness > swarm.personal_best_fitness
            swarm.personal_best_positions[better] = swarm.positions[better]
            swarm.personal_best_fitness[better] = fitness[better]
        else:
            best = int(np.argmax(swarm.personal_best_fitness))
            for i in range(config.swarm_size):
                x = swarm.positions[i]
                v = _constricted_velocity(x, swarm.velocities[i], swarm.personal_best_positions[i],
                                          swarm.personal_best_positions[best], chi, config.c1,
                                          config.c2, move_rng.random(dimensions),
                                          move_rng.random(dimensions))
                swarm.velocities[i] = v
                swarm.positions[i] = np.clip(x + v, space.lower_bound, space.upper_bound)
                f = tracker(swarm.positions[i])
                if f > swarm.personal_best_fitness[i]:
                    swarm.personal_best_positions[i] = swarm.positions[i]
                    swarm.personal_best_fitness[i] = f
                    if f > swarm.personal_best_fitness[best]:
                        best = i
        tracker.end_iteration(t + 1)

    return tracker.result()


def run_search(config: SearchConfig, fitness_fn: FitnessFn, dimensions: int,
               archive_size: int = 1, archive_key: Optional[KeyFn] = None) -> SearchResult:
    """Maximize ``fitness_fn`` over ``[lb, ub]^dimensions`` with the configured optimizer.

    Parameters
    ----------
    config : FssConfig or PsoConfig
    fitness_fn : callable
        Maps a position vector to a float; larger is better.
    dimensions : int
    archive_size : int
        Number of best distinct solutions to keep.
    archive_key : callable, optional
        Maps a position to a hashable; two positions with the same key
        count as the same solution. Defaults to exact position equality.
    """
    if isinstance(config, PsoConfig):
        return run_pso(config, fitness_fn, dimensions, archive_size, archive_key)
    return run_fss(config, fitness_fn, dimensions, archive_size, archive_key)
