"""Rotated Schaffers F7 with shift, rotations, asymmetry and conditioning.

``rsf7`` is the minimization form (optimum -800 at the shift vector ``o``);
``g = -rsf7`` is what the optimizers maximize. Functions accept a single
vector or an ``(n, d)`` batch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import Bounds, Objective

BOX = 100.0
SHIFT_BOX = 80.0
F_OPT = -800.0


@dataclass(frozen=True)
class Rsf7Instance:
    d: int
    o: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    alpha: float = 10.0
    beta: float = 0.5
    seed: int | None = None

    def bounds(self) -> Bounds:
        return Bounds.uniform(-BOX, BOX, self.d)

    def objective(self, **kw) -> Objective:
        """Vectorized maximization objective ``g``."""
        return Objective(lambda x: -rsf7(x, self), self.d, vectorized=True, **kw)

    def to_dict(self) -> dict:
        return {
            "function": "rsf7",
            "d": self.d,
            "seed": self.seed,
            "alpha": self.alpha,
            "beta": self.beta,
            "o": self.o.tolist(),
            "m1": self.m1.ravel().tolist(),
            "m2": self.m2.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Rsf7Instance":
        d = int(doc["d"])
        return cls(
            d,
            np.asarray(doc["o"], dtype=float),
            np.asarray(doc["m1"], dtype=float).reshape(d, d),
            np.asarray(doc["m2"], dtype=float).reshape(d, d),
            float(doc.get("alpha", 10.0)),
            float(doc.get("beta", 0.5)),
            doc.get("seed"),
        )

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Rsf7Instance":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def random_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormalize a Gaussian matrix via QR, fixing R's diagonal positive."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def make_instance(d: int, seed: int) -> Rsf7Instance:
    if d < 2:
        raise ValueError("RSF7 needs d >= 2")
    rng = np.random.default_rng(seed)
    o = rng.uniform(-SHIFT_BOX, SHIFT_BOX, d)
    m1 = random_rotation(d, rng)
    m2 = random_rotation(d, rng)
    return Rsf7Instance(d, o, m1, m2, seed=seed)


def t_asy(x, beta: float) -> np.ndarray:
    """Raise positive coordinates to ``1 + beta * (i-1)/(d-1) * sqrt(x_i)``."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    ramp = np.arange(d) / (d - 1) if d > 1 else np.zeros(1)
    pos = x > 0
    xp = np.where(pos, x, 1.0)
    return np.where(pos, xp ** (1.0 + beta * ramp * np.sqrt(xp)), x)


def lambda_diagonal(d: int, alpha: float) -> np.ndarray:
    return alpha ** (np.arange(d) / (2.0 * (d - 1)))


def lambda_transform(x, alpha: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x * lambda_diagonal(x.shape[-1], alpha)


def transform(theta, inst: Rsf7Instance) -> np.ndarray:
    """``y = Lambda M2 T_asy(M1 (theta - o))`` for a vector or batch.

    The rotations use einsum rather than BLAS so a point's value does not
    depend on the batch it is evaluated in; the asymmetry power and the
    ``sin(50 z^0.2)`` term turn one-ulp differences into visible ones.
    """
    x = _rotate(inst.m1, np.asarray(theta, dtype=float) - inst.o)
    x = _rotate(inst.m2, t_asy(x, inst.beta))
    return lambda_transform(x, inst.alpha)


def _rotate(m: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.einsum("...j,ij->...i", x, m)


def schaffer_f7(y) -> np.ndarray:
    """Pair-chain Schaffer F7 core on already-transformed coordinates (no offset)."""
    y = np.asarray(y, dtype=float)
    z = np.sqrt(y[..., :-1] ** 2 + y[..., 1:] ** 2)
    sz = np.sqrt(z)
    terms = sz + sz * np.sin(50.0 * z**0.2) ** 2
    return terms.mean(axis=-1) ** 2


def rsf7(theta, inst: Rsf7Instance):
    """Minimization value; -800 exactly at ``theta == inst.o``."""
    out = schaffer_f7(transform(theta, inst)) + F_OPT
    return float(out) if np.ndim(out) == 0 else out


def g(theta, inst: Rsf7Instance):
    return -rsf7(theta, inst)
