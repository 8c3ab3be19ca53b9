"""Kepler's equation and the anomaly conversions. All functions broadcast."""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi
TOL = 1e-13
NEWTON_STEPS = 50
BISECTION_STEPS = 200


def _check_e(e):
    e = np.asarray(e, dtype=float)
    if np.any(~((e >= 0.0) & (e < 1.0))):
        raise ValueError("eccentricity out of range: need 0 <= e < 1")
    return e


def solve_kepler(mean_anomaly, e):
    """Eccentric anomaly ``E`` in [0, 2pi) solving ``E - e sin E = M``.

    Newton's method from ``E0 = M + e sin M`` with analytic derivative
    ``1 - e cos E``; elements that do not converge in 50 steps are finished
    by bisection on [0, 2pi], where the residual is monotone.
    """
    e = _check_e(e)
    m = np.mod(np.asarray(mean_anomaly, dtype=float), TWO_PI)
    m, e = np.broadcast_arrays(m, e)
    E = m + e * np.sin(m)
    for _ in range(NEWTON_STEPS):
        resid = E - e * np.sin(E) - m
        if np.all(np.abs(resid) <= TOL):
            break
        E = E - resid / (1.0 - e * np.cos(E))
    resid = E - e * np.sin(E) - m
    bad = ~(np.abs(resid) <= TOL)
    if np.any(bad):
        E = np.array(E, copy=True)
        E[bad] = _bisect(m[bad], e[bad])
    E = np.where(E < 0.0, E + TWO_PI, E)
    E = np.where(E >= TWO_PI, E - TWO_PI, E)
    return float(E) if E.ndim == 0 else E


def _bisect(m, e, tol=TOL):
    lo = np.zeros_like(m)
    hi = np.full_like(m, TWO_PI)
    mid = 0.5 * (lo + hi)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        f = mid - e * np.sin(mid) - m
        if np.all(np.abs(f) <= tol) or np.all(hi - lo <= 4e-16 * TWO_PI):
            break
        up = f > 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    return mid


def true_anomaly(E, e):
    """Half-angle relation in two-argument form, mapped to [0, 2pi)."""
    e = _check_e(e)
    E = np.asarray(E, dtype=float)
    half = 0.5 * E
    t = 2.0 * np.arctan2(np.sqrt(1.0 + e) * np.sin(half), np.sqrt(1.0 - e) * np.cos(half))
    t = np.mod(t, TWO_PI)
    return float(t) if t.ndim == 0 else t


def mean_anomaly(t, period, mu0):
    return np.mod(TWO_PI * np.asarray(t, dtype=float) / period + mu0, TWO_PI)
