"""scikit-learn style front ends.

The optimizers follow the estimator conventions (constructor hyperparameters,
``get_params``/``set_params``, trailing-underscore results) but are fitted to
an objective rather than a design matrix, so the entry point is
``maximize(objective, bounds)``. The radial-velocity models are ordinary
regressors on time: ``fit(t, v, sigma=...)`` then ``predict(t)``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, clone
from sklearn.utils.validation import check_array, check_consistent_length, check_is_fitted

from . import rv
from .algorithm import RsEdaConfig, optimize
from .baseline import EmnaConfig, emna_optimize
from .core import Bounds, Objective


def _seed(random_state) -> int:
    if random_state is None:
        return 0
    if isinstance(random_state, (int, np.integer)):
        return int(random_state)
    raise TypeError("random_state must be an int or None")


def _check_bounds(bounds) -> Bounds:
    if isinstance(bounds, Bounds):
        return bounds
    arr = check_array(bounds, ensure_2d=True)
    if arr.shape[1] != 2:
        raise ValueError("bounds must be a Bounds or an array of (low, high) rows")
    return Bounds(arr[:, 0], arr[:, 1])


def _check_objective(objective, dim: int) -> Objective:
    if isinstance(objective, Objective):
        return objective
    if not callable(objective):
        raise TypeError("objective must be callable")
    return Objective(objective, dim)


class _Maximizer(BaseEstimator):
    def _run(self, objective, bounds):
        raise NotImplementedError

    def maximize(self, objective, bounds):
        """Search for the maximum of ``objective`` inside ``bounds``.

        ``bounds`` is a :class:`~rseda.core.Bounds` or an ``(d, 2)`` array of
        ``(low, high)`` rows. Returns ``self``.
        """
        bounds = _check_bounds(bounds)
        objective = _check_objective(objective, bounds.dim)
        best, trace = self._run(objective, bounds)
        self.best_params_ = best.params
        self.best_fitness_ = best.fitness
        self.trace_ = trace
        self.n_evaluations_ = int(trace.records[-1][0])
        return self

    def minimize(self, func, bounds):
        """Same as :meth:`maximize` on ``-func``; ``best_fitness_`` stays negated."""
        bounds = _check_bounds(bounds)
        if isinstance(func, Objective):
            f = func.func
            obj = Objective.negated(f, bounds.dim, vectorized=func.vectorized)
        else:
            obj = Objective.negated(func, bounds.dim)
        return self.maximize(obj, bounds)


class RandomSubspaceEDA(_Maximizer):
    def __init__(
        self,
        n_init=20000,
        init_keep_fraction=0.2,
        r_per_dim=100,
        select_fraction=0.2,
        inner_patience=5,
        outer_patience=3,
        max_evaluations=10**6,
        improvement_tolerance=1e-10,
        covariance_floor=1e-12,
        pps_update_rule="improving",
        random_state=None,
    ):
        self.n_init = n_init
        self.init_keep_fraction = init_keep_fraction
        self.r_per_dim = r_per_dim
        self.select_fraction = select_fraction
        self.inner_patience = inner_patience
        self.outer_patience = outer_patience
        self.max_evaluations = max_evaluations
        self.improvement_tolerance = improvement_tolerance
        self.covariance_floor = covariance_floor
        self.pps_update_rule = pps_update_rule
        self.random_state = random_state

    def config(self) -> RsEdaConfig:
        params = self.get_params()
        seed = _seed(params.pop("random_state"))
        return RsEdaConfig(seed=seed, **params)

    def _run(self, objective, bounds):
        return optimize(objective, bounds, self.config())


class EMNA(_Maximizer):
    def __init__(
        self,
        population_size=20000,
        select_fraction=0.2,
        max_evaluations=10**6,
        improvement_tolerance=1e-10,
        patience=5,
        covariance_floor=1e-12,
        random_state=None,
    ):
        self.population_size = population_size
        self.select_fraction = select_fraction
        self.max_evaluations = max_evaluations
        self.improvement_tolerance = improvement_tolerance
        self.patience = patience
        self.covariance_floor = covariance_floor
        self.random_state = random_state

    def config(self) -> EmnaConfig:
        params = self.get_params()
        seed = _seed(params.pop("random_state"))
        return EmnaConfig(seed=seed, **params)

    def _run(self, objective, bounds):
        return emna_optimize(objective, bounds, self.config())


def _check_rv(t, v, sigma):
    t = check_array(t, ensure_2d=False, dtype=float)
    if t.ndim == 2:
        if t.shape[1] != 1:
            raise ValueError("times must be a vector or a single-column matrix")
        t = t[:, 0]
    v = check_array(v, ensure_2d=False, dtype=float).ravel()
    sigma = np.ones_like(v) if sigma is None else np.broadcast_to(np.asarray(sigma, dtype=float), v.shape)
    check_consistent_length(t, v, sigma)
    return rv.RvDataset(t, v, sigma)


def _check_times(t):
    t = check_array(t, ensure_2d=False, dtype=float)
    return t[:, 0] if t.ndim == 2 else t


class KeplerianRV(RegressorMixin, BaseEstimator):
    """Maximum-likelihood j-planet radial-velocity model.

    Parameters
    ----------
    n_planets : int
    optimizer : RandomSubspaceEDA, optional
        Cloned before use; defaults to ``RandomSubspaceEDA()``.

    Attributes
    ----------
    params_ : RvModelParams
    ln_likelihood_ : float
    bic_ : float
    trace_ : RunTrace
    """

    def __init__(self, n_planets=1, optimizer=None):
        self.n_planets = n_planets
        self.optimizer = optimizer

    def _optimizer_config(self) -> RsEdaConfig:
        opt = RandomSubspaceEDA() if self.optimizer is None else clone(self.optimizer)
        return opt.config()

    def fit(self, t, v, sigma=None):
        data = _check_rv(t, v, sigma)
        if self.n_planets < 0:
            raise ValueError("n_planets must be >= 0")
        self.params_, self.ln_likelihood_, self.trace_ = rv.fit_model(data, self.n_planets, self._optimizer_config())
        self.bic_ = rv.bic(self.ln_likelihood_, rv.n_parameters(self.n_planets), data.n)
        self.n_features_in_ = 1
        return self

    def predict(self, t):
        check_is_fitted(self, "params_")
        return rv.model_velocity(_check_times(t), self.params_)

    def log_likelihood(self, t, v, sigma=None) -> float:
        check_is_fitted(self, "params_")
        return rv.log_likelihood(self.params_, _check_rv(t, v, sigma))


class RVModelSelector(RegressorMixin, BaseEstimator):
    """Fit 0..max_planets planets and keep the lowest-BIC model."""

    def __init__(self, max_planets=2, optimizer=None):
        self.max_planets = max_planets
        self.optimizer = optimizer

    def fit(self, t, v, sigma=None):
        data = _check_rv(t, v, sigma)
        opt = RandomSubspaceEDA() if self.optimizer is None else clone(self.optimizer)
        self.report_ = rv.select_model(data, self.max_planets, opt.config())
        if self.report_.selected_j is None:
            raise RuntimeError("every candidate model failed to fit")
        self.selected_j_ = self.report_.selected_j
        self.params_ = self.report_.selected.params
        self.n_features_in_ = 1
        return self

    def predict(self, t):
        check_is_fitted(self, "params_")
        return rv.model_velocity(_check_times(t), self.params_)
