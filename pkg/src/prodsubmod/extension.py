"""The convex extension on blockwise nonincreasing vectors and its greedy algorithm.

For ``rho`` with nonincreasing blocks the extension is

    h(rho) = H(0) + sum_s t(s) * (H[y(s)] - H[y(s-1)])

where ``t(1) >= t(2) >= ...`` lists all entries of ``rho`` and the chain ``y``
climbs from the all-zeros point to the top point one unit step at a time.  The
increments form a subgradient ``w`` that is also a vertex of the base polytope.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from .domain import ProductDomain, ValueOracle
from .errors import MonotonicityError, NonFiniteValueError
from .vectors import DualPoint, GreedyOutput, Ordering

MONOTONE_TOL = 1e-12


def _rng(seed):
    if seed is None or isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def check_monotone(flat, domain: ProductDomain, tol: float = MONOTONE_TOL) -> None:
    for i in range(domain.n):
        b = flat[domain.offsets[i]:domain.offsets[i + 1]]
        if b.size > 1 and np.any(np.diff(b) > tol):
            raise MonotonicityError(f"block {i} of rho is not nonincreasing: {b.tolist()}")


def theta(rho, t: float, domain: ProductDomain) -> np.ndarray:
    """Threshold map: component ``i`` counts the entries of block ``i`` strictly above ``t``.

    At a breakpoint ``t == rho_i(j)`` the lower coordinate is returned.
    """
    flat = domain.flatten(rho)
    return np.add.reduceat((flat > t).astype(int), domain.offsets[:-1])


def compatible_ordering(rho, domain: ProductDomain, seed=None) -> Ordering:
    """Sort all entries decreasingly while keeping each block in level order.

    Ties between blocks are broken by block index when ``seed`` is ``None`` and at
    random otherwise.
    """
    flat = domain.flatten(rho)
    # blocks within tolerance of monotone are sorted on their running minimum
    key = np.concatenate([np.minimum.accumulate(b) for b in domain.split(flat)])
    rng = _rng(seed)
    if rng is None:
        tie = domain.block_of.astype(float)
    else:
        tie = rng.random(domain.r)
        for i in range(domain.n):
            a, b = domain.offsets[i], domain.offsets[i + 1]
            tie[a:b] = np.sort(tie[a:b])
    entries = np.lexsort((domain.level_of, tie, -key)).astype(np.int32)
    return Ordering(entries=entries, blocks=domain.block_of[entries],
                    levels=domain.level_of[entries], thresholds=flat[entries])


def chain_points(ordering: Ordering, domain: ProductDomain) -> np.ndarray:
    """The ``r + 1`` points ``y(0), ..., y(r)`` visited by an ordering."""
    steps = np.zeros((domain.r + 1, domain.n), dtype=int)
    steps[np.arange(1, domain.r + 1), ordering.blocks] = 1
    return np.cumsum(steps, axis=0)


def _chain_values(oracle: ValueOracle, chain: np.ndarray) -> np.ndarray:
    vals = oracle.evaluate(chain)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValueError(f"oracle {oracle.name!r} returned a non-finite value")
    return vals


def greedy_vertex(oracle: ValueOracle, ordering: Ordering) -> np.ndarray:
    """Flat greedy vertex ``w`` for a given ordering."""
    vals = _chain_values(oracle, chain_points(ordering, oracle.domain))
    w = np.empty(oracle.domain.r)
    w[ordering.entries] = np.diff(vals)
    return w


def greedy(oracle: ValueOracle, rho, seed=None, ordering: Optional[Ordering] = None) -> GreedyOutput:
    """Evaluate the extension at ``rho`` and return a maximizing base-polytope vertex.

    Uses exactly ``r + 1`` oracle evaluations.  Raises ``MonotonicityError`` when a
    block of ``rho`` increases by more than ``1e-12``.
    """
    domain = oracle.domain
    flat = domain.flatten(rho)
    check_monotone(flat, domain)
    if ordering is None:
        ordering = compatible_ordering(flat, domain, seed)
    chain = chain_points(ordering, domain)
    vals = _chain_values(oracle, chain)
    diffs = np.diff(vals)
    w = np.empty(domain.r)
    w[ordering.entries] = diffs
    value = float(vals[0] + np.dot(flat[ordering.entries], diffs))
    best = int(np.argmin(vals))
    return GreedyOutput(
        w=DualPoint(domain, w, [(1.0, ordering)]),
        value=value,
        best_point=chain[best].copy(),
        best_value=float(vals[best]),
        chain=chain,
        chain_values=vals,
        ordering=ordering,
    )


def evaluate_extension(oracle: ValueOracle, rho) -> float:
    return greedy(oracle, rho).value


def round_best(oracle: ValueOracle, rho):
    """Best point along the greedy chain of ``rho`` (all thresholdings of ``rho``)."""
    out = greedy(oracle, rho)
    return out.best_point, out.best_value
