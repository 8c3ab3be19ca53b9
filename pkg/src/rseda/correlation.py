"""Sample linear partial correlations between the columns of the pool."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COND_LIMIT = 1e7


@dataclass
class CorrelationMatrix:
    entries: np.ndarray
    degenerate: np.ndarray  # bool per column: zero variance, correlations forced to 0
    epsilon: float = 0.0  # ridge added to invert the sample correlation matrix

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def regularized_inverse(m, max_epsilon: float = 1e-2):
    """Invert ``m + eps * I``, escalating ``eps`` by decades from 0.

    Returns
    -------
    inverse : ndarray
    eps : float
        The ridge actually used; 0 when ``m`` inverted cleanly.
    """
    m = np.asarray(m, dtype=float)
    eye = np.eye(m.shape[0])
    n_steps = int(round(np.log10(max_epsilon))) + 12
    for eps in [0.0] + [10.0 ** (k - 12) for k in range(n_steps + 1)]:
        a = m + eps * eye
        # beyond this condition number the inverse is too inaccurate to trust
        if np.linalg.cond(a) < COND_LIMIT:
            return np.linalg.inv(a), eps
    raise np.linalg.LinAlgError("irrecoverably singular")


def partial_correlation_matrix(data) -> CorrelationMatrix:
    """Partial correlation of every column pair given all remaining columns.

    Computed from the precision matrix ``P`` of the sample correlation matrix,
    ``C[i, j] = -P[i, j] / sqrt(P[i, i] * P[j, j])``. Zero-variance columns are
    excluded from the computation and get zero correlation with everything.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise ValueError("expected an (a, d) matrix")
    a, d = x.shape
    if a < 3:
        raise ValueError("insufficient samples")
    std = x.std(axis=0, ddof=1)
    scale = np.maximum(np.abs(x).max(axis=0), 1.0)
    degenerate = ~(std > 1e-14 * scale)
    live = np.flatnonzero(~degenerate)

    out = np.eye(d)
    eps = 0.0
    if live.size >= 2:
        z = (x[:, live] - x[:, live].mean(axis=0)) / std[live]
        corr = (z.T @ z) / (a - 1)
        corr = 0.5 * (corr + corr.T)
        prec, eps = regularized_inverse(corr)
        diag = np.sqrt(np.diag(prec))
        pc = -prec / np.outer(diag, diag)
        pc = np.clip(0.5 * (pc + pc.T), -1.0, 1.0)
        np.fill_diagonal(pc, 1.0)
        out[np.ix_(live, live)] = pc
    return CorrelationMatrix(out, degenerate, eps)
