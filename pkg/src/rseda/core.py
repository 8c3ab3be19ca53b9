"""Shared optimization primitives.

Everything in this package *maximizes*. Minimization problems are wrapped by
negation at the boundary (see :meth:`Objective.negated`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np


class BudgetExhausted(RuntimeError):
    """Raised when an objective would exceed its evaluation budget."""


class Bounds:
    """Box bounds with an optional logarithmic or periodic flag per dimension.

    Optimizers never see raw coordinates: they work in the unit cube, where a
    linear dimension maps affinely onto ``[lower, upper]`` and a logarithmic
    one maps affinely onto ``[log(lower), log(upper)]``. Periodic dimensions
    are wrapped into range instead of clipped.
    """

    def __init__(self, lower, upper, log_scale=None, periodic=None):
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper must be 1-d vectors of equal length")
        if not np.all(lower < upper):
            raise ValueError("lower[i] < upper[i] is required for every dimension")
        d = lower.size
        log_scale = np.zeros(d, bool) if log_scale is None else np.broadcast_to(np.asarray(log_scale, bool), (d,)).copy()
        periodic = np.zeros(d, bool) if periodic is None else np.broadcast_to(np.asarray(periodic, bool), (d,)).copy()
        if np.any(lower[log_scale] <= 0):
            raise ValueError("logarithmic scale requires lower[i] > 0")
        if np.any(log_scale & periodic):
            raise ValueError("a dimension cannot be both logarithmic and periodic")
        self.lower = lower
        self.upper = upper
        self.log_scale = log_scale
        self.periodic = periodic
        self._lo = np.where(log_scale, np.log(np.where(log_scale, lower, 1.0)), lower)
        self._hi = np.where(log_scale, np.log(np.where(log_scale, upper, 1.0)), upper)

    @classmethod
    def uniform(cls, low: float, high: float, dim: int) -> "Bounds":
        return cls(np.full(dim, low), np.full(dim, high))

    @property
    def dim(self) -> int:
        return self.lower.size

    def to_unit(self, x):
        x = np.asarray(x, dtype=float)
        s = np.where(self.log_scale, np.log(np.where(self.log_scale, x, 1.0)), x)
        return (s - self._lo) / (self._hi - self._lo)

    def from_unit(self, u):
        u = np.asarray(u, dtype=float)
        s = self._lo + u * (self._hi - self._lo)
        x = np.array(s, copy=True)
        if self.log_scale.any():
            x[..., self.log_scale] = np.exp(s[..., self.log_scale])
        # exp/log round trips can land a hair outside the box
        return np.clip(x, self.lower, self.upper)

    def project_unit(self, u):
        """Bring unit-cube coordinates back into [0, 1]: wrap periodic, clip the rest."""
        u = np.array(u, dtype=float, copy=True)
        if self.periodic.any():
            u[..., self.periodic] = np.mod(u[..., self.periodic], 1.0)
        return np.clip(u, 0.0, 1.0, out=u)

    def __repr__(self):
        return f"Bounds(dim={self.dim})"


@dataclass
class Solution:
    params: np.ndarray
    fitness: float

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        self.fitness = float(self.fitness)


def clamp_to_bounds(params, bounds: Bounds) -> np.ndarray:
    """Clip each coordinate into ``[lower[i], upper[i]]``."""
    params = np.asarray(params, dtype=float)
    if params.shape[-1] != bounds.dim:
        raise ValueError(f"expected arity {bounds.dim}, got {params.shape[-1]}")
    return np.clip(params, bounds.lower, bounds.upper)


def _sort_key(fitness: np.ndarray) -> np.ndarray:
    # NaN ranks below everything; stable argsort on the negation keeps input order on ties
    f = np.where(np.isnan(fitness), -np.inf, fitness)
    return np.argsort(-f, kind="stable")


def truncation_indices(fitness, fraction: float) -> np.ndarray:
    """Indices of the ``ceil(fraction * n)`` fittest entries, best first."""
    fitness = np.asarray(fitness, dtype=float)
    if fitness.size == 0:
        raise ValueError("empty population")
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    keep = math.ceil(fraction * fitness.size)
    return _sort_key(fitness)[:keep]


def truncation_select(solutions: Sequence[Solution], fraction: float) -> list[Solution]:
    """Keep the fittest fraction of ``solutions``, ordered by descending fitness."""
    if len(solutions) == 0:
        raise ValueError("empty population")
    idx = truncation_indices([s.fitness for s in solutions], fraction)
    return [solutions[i] for i in idx]


class Pps:
    """Pool of promising solutions: a bounded archive kept sorted by fitness.

    Stored as a matrix of coordinates plus a fitness vector so the optimizer
    can project it onto subspaces without copying through Python objects.
    Ties keep insertion order, earlier members first.
    """

    def __init__(self, capacity: int, dim: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self.params = np.empty((0, dim))
        self.fitness = np.empty(0)

    def __len__(self):
        return self.fitness.size

    @property
    def members(self) -> list[Solution]:
        return [Solution(p.copy(), f) for p, f in zip(self.params, self.fitness)]

    @property
    def best(self) -> Solution:
        if len(self) == 0:
            raise ValueError("empty pool")
        return Solution(self.params[0].copy(), self.fitness[0])

    def update(self, params, fitness) -> "Pps":
        params = np.asarray(params, dtype=float).reshape(-1, self.params.shape[1])
        fitness = np.asarray(fitness, dtype=float).ravel()
        if fitness.size == 0:
            return self
        all_p = np.vstack([self.params, params])
        all_f = np.concatenate([self.fitness, fitness])
        order = _sort_key(all_f)[: self.capacity]
        self.params = all_p[order]
        self.fitness = all_f[order]
        return self


def pps_update(pps: Pps, candidates: Iterable[Solution]) -> Pps:
    candidates = list(candidates)
    if not candidates:
        return pps
    return pps.update(np.array([c.params for c in candidates]), [c.fitness for c in candidates])


@dataclass
class Objective:
    """A fitness function with exact evaluation accounting.

    ``func`` maps a parameter vector to a real number. With ``vectorized=True``
    it instead maps an ``(n, d)`` batch to ``n`` values in one call; the
    counter still advances once per row.
    """

    func: Callable
    dim: int
    vectorized: bool = False
    max_evaluations: int | None = None
    n_evaluations: int = field(default=0, init=False)

    def remaining(self) -> float:
        if self.max_evaluations is None:
            return math.inf
        return self.max_evaluations - self.n_evaluations

    def _charge(self, n: int):
        if n > self.remaining():
            raise BudgetExhausted(f"evaluation budget of {self.max_evaluations} exhausted")
        self.n_evaluations += n

    def __call__(self, x) -> float:
        return float(self.evaluate(np.asarray(x, dtype=float)[None, :])[0])

    def evaluate(self, batch) -> np.ndarray:
        batch = np.atleast_2d(np.asarray(batch, dtype=float))
        if batch.shape[1] != self.dim:
            raise ValueError(f"objective arity is {self.dim}, got {batch.shape[1]}")
        self._charge(batch.shape[0])
        if self.vectorized:
            out = np.asarray(self.func(batch), dtype=float).reshape(batch.shape[0])
        else:
            out = np.array([float(self.func(row)) for row in batch])
        return out

    @classmethod
    def negated(cls, func: Callable, dim: int, vectorized: bool = False, **kw) -> "Objective":
        """Wrap a function to be *minimized* as a maximization objective."""
        if vectorized:
            return cls(lambda X: -np.asarray(func(X)), dim, vectorized=True, **kw)
        return cls(lambda x: -func(x), dim, **kw)
