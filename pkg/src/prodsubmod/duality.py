"""Dual values over the two polyhedra and duality-gap certificates.

A vector ``w`` has one block of length ``k_i - 1`` per variable.  Its cumulative
sums ``v_i(x) = w_i(1) + ... + w_i(x)`` (with ``v_i(0) = 0``) are the potentials
used by both the membership test for ``W(H)`` and the dual value over ``B(H)``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .domain import DEFAULT_MAX_POINTS, ProductDomain, ValueOracle
from .errors import BudgetExceededError
from .extension import greedy
from .vectors import DualPoint

POLY_TOL = 1e-9


def _flat(w, domain: Optional[ProductDomain] = None) -> tuple:
    if isinstance(w, DualPoint):
        return w.flat, w.domain
    if domain is None:
        blocks = [np.atleast_1d(np.asarray(b, dtype=float)) for b in w]
        domain = ProductDomain([b.size + 1 for b in blocks])
    return domain.flatten(w), domain


def potentials(w, domain: Optional[ProductDomain] = None) -> list:
    """Per-block cumulative sums with the leading zero: ``[0, v_i(1), ..., v_i(k_i-1)]``."""
    flat, domain = _flat(w, domain)
    return [np.concatenate([[0.0], np.cumsum(b)]) for b in domain.split(flat)]


def dual_value_W(w, domain: Optional[ProductDomain] = None) -> float:
    """``sum_i sum_x min(w_i(x), 0)``."""
    flat, _ = _flat(w, domain)
    return float(np.minimum(flat, 0.0).sum())


def dual_value_B(w, domain: Optional[ProductDomain] = None) -> float:
    """``sum_i min_{x_i} v_i(x_i)``, the minimum of ``<w, rho>`` over feasible ``rho``."""
    return float(sum(v.min() for v in potentials(w, domain)))


@dataclass
class GapReport:
    primal_best: float
    dual_value: float
    gap: float
    evals: int
    wallclock_ms: float
    best_point: Optional[np.ndarray] = None
    certified: bool = True
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "primal_best": self.primal_best,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "evals": self.evals,
            "wallclock_ms": self.wallclock_ms,
            "best_point": None if self.best_point is None else [int(v) for v in self.best_point],
            "certified": self.certified,
            "warnings": list(self.warnings),
        }


def certify_gap(oracle: ValueOracle, rho, w) -> GapReport:
    """Primal value from rounding ``rho``, dual value ``H(0) + dual_value_B(w)``.

    The gap is only a certificate when ``w`` carries convex-combination provenance;
    otherwise the report is marked uncertified and carries a warning.
    """
    start = time.perf_counter()
    before = oracle.evals
    out = greedy(oracle, rho)
    if not isinstance(w, DualPoint):
        w = DualPoint.raw(oracle.domain, w)
    if w.domain != oracle.domain:
        raise ValueError("dual point and oracle live on different domains")
    h0 = float(out.chain_values[0])
    dual = h0 + dual_value_B(w)
    warnings = []
    if not w.certified:
        warnings.append("dual point has no provenance; membership in B(H) is not certified")
    return GapReport(
        primal_best=out.best_value,
        dual_value=dual,
        gap=out.best_value - dual,
        evals=oracle.evals - before,
        wallclock_ms=1000.0 * (time.perf_counter() - start),
        best_point=out.best_point,
        certified=w.certified,
        warnings=warnings,
    )


class MembershipResult(NamedTuple):
    member: bool
    worst_violation: float
    witness: Optional[tuple]
    top_residual: float


def check_W_membership(oracle: ValueOracle, w, domain: Optional[ProductDomain] = None,
                       tol: float = POLY_TOL, max_points: int = DEFAULT_MAX_POINTS) -> MembershipResult:
    """Exhaustively test ``sum_i v_i(x_i) <= H(x) - H(0)`` and the top equality.

    ``witness`` is the lexicographically smallest point attaining the worst
    violation (reported whether or not it exceeds ``tol``).
    """
    domain = domain or oracle.domain
    if domain.size > max_points:
        raise BudgetExceededError(f"{domain.size} points exceed the cap of {max_points}")
    t = oracle.table(max_points)
    lhs = np.zeros(domain.k)
    for i, v in enumerate(potentials(w, domain)):
        shape = [1] * domain.n
        shape[i] = -1
        lhs = lhs + v.reshape(shape)
    excess = lhs - (t - t.flat[0])
    idx = int(np.argmax(excess))
    worst = float(excess.flat[idx])
    witness = tuple(int(a) for a in np.unravel_index(idx, domain.k))
    top_res = float(excess.flat[-1])
    member = worst <= tol and abs(top_res) <= tol
    return MembershipResult(member, worst, witness, top_res)


def check_K_cone(w, domain: Optional[ProductDomain] = None, tol: float = POLY_TOL) -> bool:
    """Proper partial sums of every block are ``<= 0`` and each block sums to 0."""
    for v in potentials(w, domain):
        if abs(v[-1]) > tol or np.any(v[1:-1] > tol):
            return False
    return True
