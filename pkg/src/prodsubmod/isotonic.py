"""Pool-adjacent-violators projection onto nonincreasing sequences."""
from __future__ import annotations

import numpy as np


def pava_nonincreasing(values, weights=None) -> np.ndarray:
    """Weighted least-squares fit of ``values`` by a nonincreasing sequence.

    Solves ``min_y sum_j weights[j] (y[j] - values[j])**2`` subject to
    ``y[0] >= y[1] >= ...`` with a single stack pass.  Pooled means are computed
    once per group and broadcast, so the output is nonincreasing under exact
    comparison.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise ValueError("values must be one-dimensional")
    m = v.size
    if m == 0:
        return v.copy()
    if weights is None:
        w = np.ones(m)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != v.shape:
            raise ValueError("weights must match values in length")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")

    means = []
    wsum = []
    counts = []
    for x, wx in zip(v.tolist(), w.tolist()):
        mu, ws, c = x, wx, 1
        # a later group may not exceed an earlier one
        while means and means[-1] < mu:
            pw = wsum.pop()
            mu = (means.pop() * pw + mu * ws) / (pw + ws)
            ws += pw
            c += counts.pop()
        means.append(mu)
        wsum.append(ws)
        counts.append(c)
    return np.repeat(np.array(means), counts)


def project_feasible(rho_raw, domain=None):
    """Euclidean projection of each block onto ``{nonincreasing} ∩ [0, 1]^m``.

    ``rho_raw`` is a list of blocks, or a flat vector together with ``domain``.
    Returns the same layout it was given.
    """
    if domain is not None:
        flat = domain.flatten(rho_raw)
        out = np.empty_like(flat)
        for i in range(domain.n):
            a, b = domain.offsets[i], domain.offsets[i + 1]
            out[a:b] = np.clip(pava_nonincreasing(flat[a:b]), 0.0, 1.0)
        if isinstance(rho_raw, np.ndarray) and rho_raw.ndim == 1:
            return out
        return domain.split(out)
    return [np.clip(pava_nonincreasing(np.atleast_1d(b)), 0.0, 1.0) for b in rho_raw]


def project_blocks(flat, offsets, weights=None, box: bool = True) -> np.ndarray:
    """Blockwise PAVA on a flat vector split at ``offsets``; optionally clamp to [0, 1]."""
    flat = np.asarray(flat, dtype=float)
    out = np.empty_like(flat)
    for a, b in zip(offsets[:-1], offsets[1:]):
        wb = None if weights is None else weights[a:b]
        out[a:b] = pava_nonincreasing(flat[a:b], wb)
    if box:
        np.clip(out, 0.0, 1.0, out=out)
    return out
