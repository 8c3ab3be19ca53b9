"""Full-space Gaussian EDA (EMNA-global), the comparison baseline."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .algorithm import RunTrace, SearchState, _as_objective, _Evaluator, _project, fit_gaussian, sample_gaussian
from .core import Bounds, Pps, Solution, truncation_indices


@dataclass
class EmnaConfig:
    population_size: int = 20000
    select_fraction: float = 0.2
    max_evaluations: int = 10**6
    improvement_tolerance: float = 1e-10
    patience: float = 5
    covariance_floor: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if not 0.0 < self.select_fraction <= 1.0:
            raise ValueError("select_fraction must lie in (0, 1]")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")

    def as_dict(self) -> dict:
        return asdict(self)


def emna_generations(
    selected: np.ndarray, state: SearchState, config: EmnaConfig, rng: np.random.Generator, max_iterations=math.inf
) -> SearchState:
    """Generational loop: fit, resample the whole population, select, repeat.

    ``selected`` seeds the first model. The population is replaced outright
    each generation; only the incumbent in ``state`` is elitist.
    """
    bounds = state.evaluator.bounds
    idx = np.arange(bounds.dim)
    stall = 0
    it = 0
    while stall < config.patience and it < max_iterations:
        n = state.batch_size(config.population_size)
        if n == 0:
            break
        model = fit_gaussian(selected, config.covariance_floor)
        pop = _project(bounds, idx, sample_gaussian(model, n, rng))
        f = state.evaluator(pop)
        selected = pop[truncation_indices(f, config.select_fraction)]
        stall = 0 if state.offer(pop, f) else stall + 1
        it += 1
        if state.exhausted or selected.shape[0] < 2:
            break
    return state


def emna_optimize(objective, bounds: Bounds, config: EmnaConfig | None = None, rng=None) -> tuple[Solution, RunTrace]:
    config = config or EmnaConfig()
    rng = np.random.default_rng(config.seed) if rng is None else rng
    objective = _as_objective(objective, bounds.dim)
    ev = _Evaluator(objective, bounds, config.max_evaluations)
    if ev.remaining < config.population_size or objective.remaining() < config.population_size:
        raise ValueError("budget smaller than one population")
    pop = rng.uniform(0.0, 1.0, size=(config.population_size, bounds.dim))
    f = ev(pop)
    # a one-slot pool is just a holder for the incumbent
    state = SearchState(Pps(1, bounds.dim).update(pop, f), ev, config.improvement_tolerance)
    state.trace.record(ev.used, state.best_f)
    emna_generations(pop[truncation_indices(f, config.select_fraction)], state, config, rng)
    state.trace.record(ev.used, state.best_f)
    best = state.solution(bounds)
    state.trace.best = best
    state.trace.termination = "budget" if ev.remaining == 0 or state.exhausted else "converged"
    return best, state.trace
