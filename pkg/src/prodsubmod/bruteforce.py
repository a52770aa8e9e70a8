"""Independent ground-truth oracles used to verify the solvers.

Nothing here calls the greedy algorithm: the extension is integrated interval by
interval over the sorted thresholds, and minima come from full enumeration.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .domain import ProductDomain, ValueOracle
from .errors import BudgetExceededError, MonotonicityError


@dataclass(frozen=True)
class AuditBudget:
    max_points: int = 2_000_000
    max_evals: int = 10_000_000

    def __post_init__(self):
        if self.max_points <= 0 or self.max_evals <= 0:
            raise ValueError("audit caps must be positive")


class ExhaustiveMin(NamedTuple):
    point: np.ndarray
    value: float
    ties: int


def exhaustive_min(oracle: ValueOracle, domain: Optional[ProductDomain] = None,
                   budget: AuditBudget = AuditBudget(), tie_tol: float = 0.0) -> ExhaustiveMin:
    """Global minimum by full enumeration; lexicographically smallest argmin.

    ``ties`` counts points within ``tie_tol`` of the minimum.
    """
    domain = domain or oracle.domain
    if domain.size > min(budget.max_points, budget.max_evals):
        raise BudgetExceededError(f"{domain.size} points exceed the audit budget")
    pts = domain.all_points(budget.max_points)
    vals = oracle.evaluate(pts)
    idx = int(np.argmin(vals))
    v = float(vals[idx])
    ties = int(np.count_nonzero(vals <= v + tie_tol))
    return ExhaustiveMin(pts[idx].copy(), v, ties)


def extension_by_breakpoint_integration(oracle: ValueOracle, rho) -> float:
    """Extension value as a piecewise-constant integral over sorted thresholds.

    Evaluates ``H(theta(rho, t))`` at one interior point of each of the ``m + 1``
    intervals cut out by the ``m`` distinct thresholds, plus ``H(top)`` and
    ``H(0)`` for the endpoint terms: ``m + 3`` evaluations in total.
    """
    domain = oracle.domain
    flat = domain.flatten(rho)
    for i in range(domain.n):
        b = flat[domain.offsets[i]:domain.offsets[i + 1]]
        if np.any(np.diff(b) > 1e-12):
            raise MonotonicityError(f"block {i} is not nonincreasing")
    ts = np.unique(flat)
    lo, hi = ts[0], ts[-1]
    mids = np.concatenate([[lo - 1.0], 0.5 * (ts[:-1] + ts[1:]), [hi + 1.0]])
    # theta at a query point: number of entries of each block above it
    above = flat[None, :] > mids[:, None]
    pts = np.add.reduceat(above.astype(int), domain.offsets[:-1], axis=1)
    vals = oracle.evaluate(pts)
    ends = oracle.evaluate(np.stack([domain.top, domain.zero]))
    h_top, h_zero = float(ends[0]), float(ends[1])
    widths = np.diff(ts)
    inner = float(np.dot(widths, vals[1:-1]))
    return inner + lo * h_top + (1.0 - hi) * h_zero


class ProbeResult(NamedTuple):
    passed: bool
    witness: Optional[tuple]
    worst_excess: float


def random_feasible_rho(domain: ProductDomain, rng: np.random.Generator, spread: str = "mixed") -> np.ndarray:
    """Random flat ``rho`` with nonincreasing blocks in [0, 1], with occasional ties."""
    blocks = []
    for ki in domain.k:
        b = np.sort(rng.random(ki - 1))[::-1]
        if spread == "mixed" and rng.random() < 0.3:
            b = np.round(b * 4) / 4
        blocks.append(b)
    return np.concatenate(blocks)


def convexity_probe(evaluate: Callable[[np.ndarray], float], domain: ProductDomain,
                    segments: int = 500, seed=0, tol: float = 1e-9) -> ProbeResult:
    """Midpoint-convexity check along random feasible segments.

    ``evaluate`` maps a flat feasible ``rho`` to the extension value.  Returns the
    first violating pair ``(rho, rho')`` as the witness.
    """
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(segments):
        a = random_feasible_rho(domain, rng)
        b = random_feasible_rho(domain, rng)
        excess = evaluate(0.5 * (a + b)) - 0.5 * (evaluate(a) + evaluate(b))
        worst = max(worst, excess)
        if excess > tol:
            return ProbeResult(False, (a, b), float(excess))
    return ProbeResult(True, None, float(worst))
