"""Random Subspace EDA.

One outer iteration estimates partial correlations from the pool of
promising solutions, partitions the coordinates into overlapping random
subspaces, and runs a small Gaussian EDA inside each subspace in turn while
every other coordinate stays pinned at the incumbent best.

All sampling and model fitting happens in unit-cube coordinates (see
:class:`~rseda.core.Bounds`); the objective only ever sees raw parameters.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import Bounds, Objective, Pps, Solution, truncation_indices
from .correlation import partial_correlation_matrix
from .subspace import Subspace, partition_subspaces


# "improving": only candidates that beat the incumbent enter the pool.
# "batch": every evaluated candidate competes for a place in the pool.
PPS_RULES = ("improving", "batch")


@dataclass
class RsEdaConfig:
    n_init: int = 20000
    init_keep_fraction: float = 0.2
    r_per_dim: int = 100
    select_fraction: float = 0.2
    inner_patience: int = 5
    outer_patience: float = 3
    max_evaluations: int = 10**6
    improvement_tolerance: float = 1e-10
    covariance_floor: float = 1e-12
    seed: int = 0
    pps_update_rule: str = "improving"

    def __post_init__(self):
        for name in ("init_keep_fraction", "select_fraction"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if self.inner_patience < 1 or self.outer_patience < 1:
            raise ValueError("patience must be >= 1")
        if self.n_init < 1 or self.r_per_dim < 1:
            raise ValueError("n_init and r_per_dim must be positive")
        if self.pps_update_rule not in PPS_RULES:
            raise ValueError(f"pps_update_rule must be one of {PPS_RULES}")
        if self.max_evaluations < self.n_init:
            raise ValueError("max_evaluations must be at least n_init")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class GaussianModel:
    mean: np.ndarray
    covariance: np.ndarray
    factor: np.ndarray  # covariance == factor @ factor.T

    @property
    def dim(self) -> int:
        return self.mean.size


def fit_gaussian(points, floor: float = 1e-12) -> GaussianModel:
    """Mean and unbiased covariance of ``points`` with eigenvalues floored."""
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < 2:
        raise ValueError("insufficient points for covariance")
    mean = x.mean(axis=0)
    dev = x - mean
    cov = dev.T @ dev / (x.shape[0] - 1)
    cov = 0.5 * (cov + cov.T)
    w, v = np.linalg.eigh(cov)
    w = np.maximum(w, floor)
    factor = v * np.sqrt(w)
    cov = (v * w) @ v.T
    cov = 0.5 * (cov + cov.T)
    return GaussianModel(mean, cov, factor)


def sample_gaussian(model: GaussianModel, n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, model.dim))
    return model.mean + z @ model.factor.T


@dataclass
class RunTrace:
    records: list = field(default_factory=list)  # (evaluations, best fitness)
    best: Solution | None = None
    termination: str = ""

    def record(self, evals: int, best_fitness: float):
        self.records.append((int(evals), float(best_fitness)))

    @property
    def evaluations(self) -> np.ndarray:
        return np.array([r[0] for r in self.records], dtype=int)

    @property
    def best_fitness(self) -> np.ndarray:
        return np.array([r[1] for r in self.records])

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["evals", "best_fitness"])
        for evals, fit in self.records:
            w.writerow([evals, repr(fit)])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text


class _Evaluator:
    """Evaluates unit-cube batches under a hard budget."""

    def __init__(self, objective: Objective, bounds: Bounds, budget: int):
        if objective.dim != bounds.dim:
            raise ValueError(f"objective arity {objective.dim} does not match bounds ({bounds.dim})")
        self.objective = objective
        self.bounds = bounds
        self.budget = int(budget)
        self.used = 0

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def __call__(self, u: np.ndarray) -> np.ndarray:
        f = self.objective.evaluate(self.bounds.from_unit(u))
        self.used += u.shape[0]
        return np.where(np.isnan(f), -np.inf, f)


class SearchState:
    """Incumbent best (unit coordinates), pool, trace and stopping bookkeeping."""

    def __init__(self, pps: Pps, evaluator: _Evaluator, tolerance: float):
        self.pps = pps
        self.evaluator = evaluator
        self.tolerance = tolerance
        self.best_u = pps.params[0].copy() if len(pps) else None
        self.best_f = float(pps.fitness[0]) if len(pps) else -np.inf
        self.trace = RunTrace()
        self.exhausted = False

    def significant(self, new: float, old: float) -> bool:
        """True when ``new`` beats ``old`` by more than the relative tolerance."""
        if not np.isfinite(old):
            return new > old
        return new - old > self.tolerance * abs(old)

    def offer(self, cand: np.ndarray, fitness: np.ndarray) -> bool:
        """Take the batch's best if it beats the incumbent; report significant gains."""
        j = int(np.argmax(fitness))
        if fitness[j] <= self.best_f:
            return False
        gain = self.significant(float(fitness[j]), self.best_f)
        self.best_u = cand[j].copy()
        self.best_f = float(fitness[j])
        self.trace.record(self.evaluator.used, self.best_f)
        return gain

    def batch_size(self, wanted: int) -> int:
        n = min(wanted, self.evaluator.remaining)
        if n < wanted:
            self.exhausted = True
        return n

    def solution(self, bounds: Bounds) -> Solution:
        return Solution(bounds.from_unit(self.best_u), self.best_f)


def _project(bounds: Bounds, idx: np.ndarray, u: np.ndarray) -> np.ndarray:
    periodic = bounds.periodic[idx]
    if periodic.any():
        u[:, periodic] = np.mod(u[:, periodic], 1.0)
    return np.clip(u, 0.0, 1.0, out=u)


def _as_objective(objective, dim) -> Objective:
    if isinstance(objective, Objective):
        return objective
    return Objective(objective, dim)


def init_pps(objective, bounds: Bounds, config: RsEdaConfig, rng: np.random.Generator) -> SearchState:
    """Uniform sample of ``n_init`` points; keep the fittest fraction as the pool."""
    objective = _as_objective(objective, bounds.dim)
    ev = _Evaluator(objective, bounds, config.max_evaluations)
    if ev.remaining < config.n_init or objective.remaining() < config.n_init:
        raise ValueError("budget too small for initialization")
    u = rng.uniform(0.0, 1.0, size=(config.n_init, bounds.dim))
    f = ev(u)
    pps = Pps(math.ceil(config.init_keep_fraction * config.n_init), bounds.dim).update(u, f)
    state = SearchState(pps, ev, config.improvement_tolerance)
    state.trace.record(ev.used, state.best_f)
    return state


def subspace_eda(
    sub: Subspace, state: SearchState, config: RsEdaConfig, rng: np.random.Generator, max_iterations: float = math.inf
) -> SearchState:
    """Gaussian EDA restricted to ``sub.indices``; other coordinates stay at the best.

    The first model is fit to the pool projected onto the subspace, later ones
    to the fittest ``select_fraction`` of the latest batch. Stops after
    ``inner_patience`` iterations without significant improvement.

    Under the default ``pps_update_rule="improving"`` only candidates that beat
    the incumbent enter the pool. Feeding it whole batches makes the pool
    collapse onto the incumbent within one outer iteration, after which every
    subspace starts from a degenerate Gaussian.
    """
    idx = np.asarray(sub.indices)
    bounds = state.evaluator.bounds
    selected = state.pps.params[:, idx]
    stall = 0
    it = 0
    while stall < config.inner_patience and it < max_iterations:
        n = state.batch_size(config.r_per_dim * idx.size)
        if n == 0:
            break
        model = fit_gaussian(selected, config.covariance_floor)
        cand = np.tile(state.best_u, (n, 1))
        cand[:, idx] = _project(bounds, idx, sample_gaussian(model, n, rng))
        f = state.evaluator(cand)
        keep = truncation_indices(f, config.select_fraction)
        selected = cand[keep][:, idx]
        if config.pps_update_rule == "batch":
            state.pps.update(cand, f)
        else:
            better = f > state.best_f
            state.pps.update(cand[better], f[better])
        stall = 0 if state.offer(cand, f) else stall + 1
        it += 1
        if state.exhausted or selected.shape[0] < 2:
            break
    return state


def optimize(objective, bounds: Bounds, config: RsEdaConfig | None = None, rng=None) -> tuple[Solution, RunTrace]:
    """Run RS-EDA to convergence or budget exhaustion.

    Parameters
    ----------
    objective : Objective or callable
        Fitness to maximize, evaluated on raw (not unit-cube) parameters.
    bounds : Bounds
    config : RsEdaConfig, optional
    rng : numpy.random.Generator, optional
        Defaults to ``default_rng(config.seed)``.

    Returns
    -------
    best : Solution
    trace : RunTrace
    """
    config = config or RsEdaConfig()
    rng = np.random.default_rng(config.seed) if rng is None else rng
    state = init_pps(objective, bounds, config, rng)
    stall = 0
    reason = "budget"
    while not state.exhausted:
        before = state.best_f
        corr = partial_correlation_matrix(state.pps.params)
        for sub in partition_subspaces(corr.entries, rng):
            subspace_eda(sub, state, config, rng)
            if state.exhausted:
                break
        state.trace.record(state.evaluator.used, state.best_f)
        stall = 0 if state.significant(state.best_f, before) else stall + 1
        if stall >= config.outer_patience:
            reason = "converged"
            break
    if state.evaluator.remaining == 0:
        reason = "budget"
    best = state.solution(bounds)
    state.trace.best = best
    state.trace.termination = reason
    return best, state.trace
