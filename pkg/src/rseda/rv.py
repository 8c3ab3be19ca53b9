"""Keplerian radial-velocity models, Gaussian likelihood with jitter, and BIC.

A j-planet model has ``2 + 5j`` parameters, laid out flat as::

    [C, s, K_1, P_1, e_1, omega_1, mu0_1, ..., K_j, P_j, e_j, omega_j, mu0_j]

with velocities in m/s, periods in days and angles in radians.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .algorithm import RsEdaConfig, optimize
from .core import Bounds, Objective
from .kepler import TWO_PI, mean_anomaly, solve_kepler, true_anomaly

logger = logging.getLogger(__name__)

DAYS_PER_YEAR = 365.25
# search ranges; "1000 years" taken as Julian years
P_MIN, P_MAX = 1.0, 1000 * DAYS_PER_YEAR
K_MIN, K_MAX = 1.0, 2128.0
C_MIN, C_MAX = -2128.0, 2128.0
S_MIN, S_MAX = 1.0, 2128.0
E_MAX = 0.99

PLANET_FIELDS = ("K", "P", "e", "omega", "mu0")


@dataclass
class RvDataset:
    t: np.ndarray
    v: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float).ravel()
        self.v = np.asarray(self.v, dtype=float).ravel()
        self.sigma = np.asarray(self.sigma, dtype=float).ravel()
        if not (self.t.size == self.v.size == self.sigma.size):
            raise ValueError("t, v and sigma must have equal length")
        if self.t.size < 1:
            raise ValueError("dataset needs at least one observation")
        if not np.all(np.isfinite(self.t)) or not np.all(np.isfinite(self.v)):
            raise ValueError("times and velocities must be finite")
        if not np.all(self.sigma > 0):
            raise ValueError("sigma must be positive")

    @property
    def n(self) -> int:
        return self.t.size

    def __len__(self):
        return self.n


@dataclass
class PlanetParams:
    K: float
    P: float
    e: float
    omega: float
    mu0: float

    def __post_init__(self):
        for name in PLANET_FIELDS:
            setattr(self, name, float(getattr(self, name)))
        self.validate()

    def validate(self):
        if not self.K >= 0:
            raise ValueError("semi-amplitude K must be non-negative")
        if not self.P > 0:
            raise ValueError("period P must be positive")
        if not 0.0 <= self.e < 1.0:
            raise ValueError("eccentricity out of range: need 0 <= e < 1")
        self.omega = math.fmod(self.omega, TWO_PI) % TWO_PI
        self.mu0 = math.fmod(self.mu0, TWO_PI) % TWO_PI

    def to_vector(self) -> np.ndarray:
        return np.array([self.K, self.P, self.e, self.omega, self.mu0])

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in PLANET_FIELDS}


@dataclass
class RvModelParams:
    c_offset: float
    jitter: float
    planets: list[PlanetParams] = field(default_factory=list)

    def __post_init__(self):
        self.c_offset = float(self.c_offset)
        self.jitter = float(self.jitter)
        self.planets = [p if isinstance(p, PlanetParams) else PlanetParams(**p) for p in self.planets]
        if not self.jitter >= 0:
            raise ValueError("jitter must be non-negative")

    @property
    def j(self) -> int:
        return len(self.planets)

    @property
    def dim(self) -> int:
        return 2 + 5 * self.j

    def to_vector(self) -> np.ndarray:
        return np.concatenate([[self.c_offset, self.jitter]] + [p.to_vector() for p in self.planets])

    @classmethod
    def from_vector(cls, theta) -> "RvModelParams":
        theta = np.asarray(theta, dtype=float)
        if (theta.size - 2) % 5:
            raise ValueError("parameter vector length must be 2 + 5j")
        planets = [PlanetParams(*theta[k : k + 5]) for k in range(2, theta.size, 5)]
        return cls(theta[0], theta[1], planets)

    def as_dict(self) -> dict:
        return {"c_offset": self.c_offset, "jitter": self.jitter, "planets": [p.as_dict() for p in self.planets]}

    @classmethod
    def from_dict(cls, doc: dict) -> "RvModelParams":
        return cls(doc["c_offset"], doc.get("jitter", 0.0), [PlanetParams(**p) for p in doc.get("planets", [])])


def velocity_shift(t, phi: PlanetParams):
    """Line-of-sight velocity induced by one planet at times ``t``."""
    return _shift(np.asarray(t, dtype=float), phi.K, phi.P, phi.e, phi.omega, phi.mu0)


def _shift(t, K, P, e, omega, mu0):
    E = solve_kepler(mean_anomaly(t, P, mu0), e)
    T = true_anomaly(E, e)
    return K * (np.cos(omega + T) + e * np.cos(omega))


def model_velocity(t, params: RvModelParams):
    t = np.asarray(t, dtype=float)
    v = np.full(t.shape, params.c_offset) if t.ndim else params.c_offset
    for phi in params.planets:
        v = v + velocity_shift(t, phi)
    return v


def batch_model_velocity(theta: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Model curves for a ``(B, 2 + 5j)`` batch of flat parameter vectors -> ``(B, n)``."""
    theta = np.atleast_2d(theta)
    t = np.asarray(t, dtype=float)[None, :]
    v = np.repeat(theta[:, :1], t.shape[1], axis=1)
    for k in range(2, theta.shape[1], 5):
        K, P, e, omega, mu0 = (theta[:, k + i, None] for i in range(5))
        v = v + _shift(t, K, P, e, omega, mu0)
    return v


def _gauss_loglike(resid, var):
    return np.sum(-0.5 * np.log(TWO_PI * var) - resid**2 / (2.0 * var), axis=-1)


def log_likelihood(params: RvModelParams, data: RvDataset) -> float:
    var = data.sigma**2 + params.jitter**2
    return float(_gauss_loglike(data.v - model_velocity(data.t, params), var))


def batch_log_likelihood(theta, data: RvDataset) -> np.ndarray:
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    var = data.sigma[None, :] ** 2 + theta[:, 1:2] ** 2
    return _gauss_loglike(data.v[None, :] - batch_model_velocity(theta, data.t), var)


def bic(ln_l_hat: float, k: int, n: int) -> float:
    """Bayesian information criterion; lower is better."""
    if n < 1 or k < 1:
        raise ValueError("bic needs n >= 1 and k >= 1")
    return -2.0 * ln_l_hat + k * math.log(n)


def n_parameters(j: int) -> int:
    return 2 + 5 * j


def parameter_bounds(j: int) -> Bounds:
    """Search box for a j-planet model; P, K and s are searched in log space."""
    lo = [C_MIN, S_MIN] + [K_MIN, P_MIN, 0.0, 0.0, 0.0] * j
    hi = [C_MAX, S_MAX] + [K_MAX, P_MAX, E_MAX, TWO_PI, TWO_PI] * j
    log = [False, True] + [True, True, False, False, False] * j
    periodic = [False, False] + [False, False, False, True, True] * j
    return Bounds(lo, hi, log_scale=log, periodic=periodic)


def likelihood_objective(data: RvDataset, j: int, **kw) -> Objective:
    return Objective(lambda th: batch_log_likelihood(th, data), n_parameters(j), vectorized=True, **kw)


def fit_model(data: RvDataset, j: int, config: RsEdaConfig | None = None, rng=None):
    """Maximum-likelihood fit of the j-planet model with RS-EDA.

    Returns
    -------
    params : RvModelParams
    ln_l_hat : float
    trace : RunTrace
    """
    config = config or RsEdaConfig()
    best, trace = optimize(likelihood_objective(data, j), parameter_bounds(j), config, rng)
    theta = best.params.copy()
    # periodic coordinates can sit exactly on 2pi after the unit-cube round trip
    theta[5::5] %= TWO_PI
    theta[6::5] %= TWO_PI
    return RvModelParams.from_vector(theta), float(best.fitness), trace


@dataclass
class ModelRecord:
    j: int
    k: int
    n: int
    ln_l: float | None
    bic: float | None
    params: RvModelParams | None
    error: str | None = None

    @property
    def available(self) -> bool:
        return self.bic is not None

    def as_dict(self) -> dict:
        out = {
            "j": self.j,
            "k": self.k,
            "n": self.n,
            "ln_l": self.ln_l,
            "bic": self.bic,
            "params": self.params.as_dict() if self.params is not None else None,
        }
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class ModelSelectionReport:
    models: list[ModelRecord]
    selected_j: int | None

    @property
    def selected(self) -> ModelRecord | None:
        for m in self.models:
            if m.j == self.selected_j:
                return m
        return None

    def as_dict(self) -> dict:
        return {"models": [m.as_dict() for m in self.models], "selected_j": self.selected_j}


def argmin_bic(records: list[ModelRecord]) -> int | None:
    avail = [m for m in records if m.available]
    if not avail:
        return None
    return min(avail, key=lambda m: (m.bic, m.j)).j


def select_model(data: RvDataset, j_max: int, config: RsEdaConfig | None = None) -> ModelSelectionReport:
    """Fit j = 0..j_max planets and pick the model with the lowest BIC."""
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    config = config or RsEdaConfig()
    records = []
    for j in range(j_max + 1):
        k = n_parameters(j)
        try:
            params, ln_l, _ = fit_model(data, j, config)
        except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            logger.warning("fit of the %d-planet model failed: %s", j, exc)
            records.append(ModelRecord(j, k, data.n, None, None, None, str(exc)))
            continue
        records.append(ModelRecord(j, k, data.n, ln_l, bic(ln_l, k, data.n), params))
    return ModelSelectionReport(records, argmin_bic(records))


def generate_synthetic(params: RvModelParams, times, sigmas, seed: int = 0) -> RvDataset:
    """Draw ``v_i ~ N(model(t_i), sigma_i^2 + s^2)``."""
    times = np.asarray(times, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    if times.shape != sigmas.shape:
        raise ValueError("times and sigmas must have the same length")
    rng = np.random.default_rng(seed)
    sd = np.sqrt(sigmas**2 + params.jitter**2)
    v = model_velocity(times, params) + sd * rng.standard_normal(times.shape)
    return RvDataset(times, v, sigmas)
