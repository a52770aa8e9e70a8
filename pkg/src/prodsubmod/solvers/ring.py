"""Reduction of multi-level minimization to set-function minimization on ``{0,1}^r``."""
from __future__ import annotations

import numpy as np

from ..domain import SetFunction, ValueOracle


def ring_closure(z: np.ndarray, offsets) -> np.ndarray:
    """Smallest blockwise nonincreasing 0/1 vector above each row of ``z``."""
    z = np.atleast_2d(np.asarray(z, dtype=int))
    out = np.empty_like(z)
    for a, b in zip(offsets[:-1], offsets[1:]):
        out[:, a:b] = np.maximum.accumulate(z[:, a:b][:, ::-1], axis=1)[:, ::-1]
    return out


def ring_family_reduce(oracle: ValueOracle, Bvec):
    """Penalized set function ``H(decode(z)) + sum_i B_i * (|closure(z)_i| - |z_i|)``.

    Returns ``(set_function, decode)`` where ``decode`` maps 0/1 rows (length ``r``)
    to points by taking, per block, the largest level set to one.
    """
    domain = oracle.domain
    Bvec = np.asarray(Bvec, dtype=float)
    if Bvec.shape != (domain.n,) or np.any(Bvec <= 0) or not np.all(np.isfinite(Bvec)):
        raise ValueError("Bvec must hold one finite, strictly positive weight per variable")
    if np.any(Bvec < oracle.lipschitz - 1e-12):
        raise ValueError("Bvec must dominate the oracle's unit-step Lipschitz bounds")
    offsets = domain.offsets

    def decode(z) -> np.ndarray:
        closed = ring_closure(z, offsets)
        pts = np.add.reduceat(closed, offsets[:-1], axis=1)
        return pts[0] if np.ndim(z) == 1 else pts

    penalty_w = Bvec[domain.block_of]

    def func(z):
        z = np.asarray(z, dtype=int)
        closed = ring_closure(z, offsets)
        pts = np.add.reduceat(closed, offsets[:-1], axis=1)
        return oracle.evaluate(pts) + (closed - z) @ penalty_w

    return SetFunction(func, domain.r, name=f"ring[{oracle.name}]"), decode
