"""Stochastic, overlapping partition of coordinates driven by correlations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Subspace:
    indices: tuple[int, ...]
    anchor: int

    def __post_init__(self):
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("subspace indices must be distinct")
        if self.anchor not in self.indices:
            raise ValueError("anchor must belong to its subspace")

    def __len__(self):
        return len(self.indices)


def cumulative_weights(row, anchor: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Order a correlation row by magnitude and return (order, cumulative mass).

    Ties keep the lower column index first, except that ``anchor`` (the
    row's own diagonal) always leads.
    """
    mag = np.abs(np.asarray(row, dtype=float))
    key = -mag
    if anchor is not None:
        key[anchor] = -np.inf
    order = np.argsort(key, kind="stable")
    w = mag[order]
    cum = np.cumsum(w / w.sum())
    cum[-1] = 1.0
    return order, cum


def subspace_size(cum: np.ndarray, r: float) -> int:
    """Smallest m (1-based) with ``cum[m-1] >= r``."""
    return int(np.searchsorted(cum, r, side="left")) + 1


def partition_subspaces(c, rng: np.random.Generator) -> list[Subspace]:
    """One subspace per row of ``c``, in row order, one uniform draw per row."""
    c = np.asarray(c, dtype=float)
    d = c.shape[0]
    subspaces = []
    for i in range(d):
        order, cum = cumulative_weights(c[i], anchor=i)
        r = rng.uniform(0.0, 1.0)
        m = min(subspace_size(cum, r), d)
        subspaces.append(Subspace(tuple(int(j) for j in order[:m]), i))
    return subspaces
