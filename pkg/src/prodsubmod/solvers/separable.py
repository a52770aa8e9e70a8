"""Separable regularization of the extension: exact divide-and-conquer and threshold sweeps.

The problem is ``min_rho h(rho) + sum_e a_e(rho_e)`` over nonincreasing blocks,
with one strictly convex term ``a_e`` per entry ``e = (i, j)`` of ``rho``.  For
every threshold ``t`` it is tied to the submodular problem

    min_x H(x) + sum_i sum_{j <= x_i} a'_{ij}(t)

whose solutions decrease with ``t`` and whose level sets recover ``rho``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from ..bruteforce import exhaustive_min
from ..domain import ModularShift, ProductDomain, ValueOracle, restrict
from ..errors import SweepMonotonicityError

SFMSolver = Callable[[ValueOracle], tuple]


@dataclass
class SeparableQuadratic:
    """Terms ``a_e(t) = c_e / 2 * (t - z_e)^2`` with positive curvatures ``c_e``."""

    domain: ProductDomain
    targets: np.ndarray
    curvatures: np.ndarray

    def __post_init__(self):
        self.targets = self.domain.flatten(self.targets)
        self.curvatures = self.domain.flatten(self.curvatures)
        if np.any(self.curvatures <= 0):
            raise ValueError("curvatures must be strictly positive")

    @classmethod
    def unit(cls, domain: ProductDomain) -> "SeparableQuadratic":
        """``1/2 ||rho||^2``."""
        return cls(domain, np.zeros(domain.r), np.ones(domain.r))

    def value(self, rho) -> float:
        return float(0.5 * np.sum(self.curvatures * (rho - self.targets) ** 2))

    def deriv(self, t, idx=slice(None)) -> np.ndarray:
        return self.curvatures[idx] * (t - self.targets[idx])

    def conjugate(self, s) -> float:
        """``sum_e a_e^*(s_e)``."""
        return float(np.sum(s * self.targets + s ** 2 / (2.0 * self.curvatures)))

    def scalar_solve(self, total: float, idx) -> float:
        """``argmin_t total * t + sum_{e in idx} a_e(t)``, in closed form."""
        c, z = self.curvatures[idx], self.targets[idx]
        return float((np.dot(c, z) - total) / c.sum())

    def gradient_map(self, w) -> np.ndarray:
        """Minimizer of ``<rho, w> + sum a(rho)`` over nonincreasing blocks (weighted PAVA)."""
        from ..isotonic import project_blocks

        return project_blocks(self.targets - w / self.curvatures, self.domain.offsets,
                              weights=self.curvatures, box=False)


class SeparableConvex:
    """General strictly convex terms given by vectorized callables.

    ``value(t)`` and ``deriv(t)`` map an array of per-entry arguments (length ``r``)
    to per-entry values and derivatives; derivatives must be strictly increasing
    and range over the whole real line.
    """

    def __init__(self, domain: ProductDomain, value: Callable, deriv: Callable):
        self.domain = domain
        self._value = value
        self._deriv = deriv

    def value(self, rho) -> float:
        return float(np.sum(self._value(np.asarray(rho, dtype=float))))

    def deriv(self, t, idx=slice(None)) -> np.ndarray:
        full = self._deriv(np.full(self.domain.r, float(t)))
        return np.asarray(full)[idx]

    def scalar_solve(self, total: float, idx) -> float:
        def slope(t):
            return total + float(np.sum(self.deriv(t, idx)))

        lo, hi = -1.0, 1.0
        while slope(lo) > 0:
            lo *= 2.0
        while slope(hi) < 0:
            hi *= 2.0
        return brentq(slope, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def exhaustive_sfm(oracle: ValueOracle):
    res = exhaustive_min(oracle)
    return res.point, res.value


def _block_entries(domain: ProductDomain, lower, upper) -> np.ndarray:
    """Flat indices of the entries ``(i, j)`` with ``lower_i < j <= upper_i``."""
    parts = [domain.offsets[i] + np.arange(lower[i], upper[i]) for i in range(domain.n)]
    return np.concatenate(parts).astype(int)


def divide_and_conquer(oracle: ValueOracle, sep, sfm_solver: Optional[SFMSolver] = None,
                       tol: float = 1e-9, report: Optional[list] = None) -> np.ndarray:
    """Exact minimizer ``rho`` of the separable problem by recursive box splitting.

    On a box ``[lower, upper]`` a single scalar ``t`` balances the box's total
    increment; if the shifted submodular problem on the box has no point strictly
    below ``H(lower)`` every entry of the box gets value ``t``, otherwise the box
    splits at the minimizer.  Near-threshold decisions (within ``10 * tol``) are
    appended to ``report`` when given.
    """
    sfm_solver = sfm_solver or exhaustive_sfm
    d = oracle.domain
    rho = np.full(d.r, np.nan)
    stack = [(d.zero, d.top)]
    splits = 0
    while stack:
        lower, upper = stack.pop()
        idx = _block_entries(d, lower, upper)
        if idx.size == 0:
            continue
        h_lo, h_up = oracle.evaluate(np.stack([lower, upper]))
        t = sep.scalar_solve(float(h_up - h_lo), idx)
        w = -sep.deriv(t, idx)
        box = restrict(oracle, lower, upper, drop_fixed=True)
        shifted = ModularShift(box, -w)
        y_box, val = sfm_solver(shifted)
        scale = max(1.0, abs(h_lo))
        margin = (h_lo - val) / scale
        if report is not None and abs(margin) <= 10 * tol:
            report.append({"lower": lower.tolist(), "upper": upper.tolist(), "margin": margin})
        if margin <= tol:
            rho[idx] = t
            continue
        y = box.embed(np.asarray(y_box, dtype=int))
        splits += 1
        if splits > d.r:
            raise RuntimeError("divide-and-conquer exceeded its recursion cap")
        stack.append((y, upper))
        stack.append((lower, y))
    return rho


@dataclass
class SweepResult:
    t_grid: np.ndarray
    points: np.ndarray
    rho: np.ndarray


def parametric_sweep(oracle: ValueOracle, sep, t_grid,
                     sfm_solver: Optional[SFMSolver] = None) -> SweepResult:
    """Solve the shifted submodular problem at each ``t`` and rebuild ``rho`` from level sets.

    ``rho_i(j)`` is the largest grid ``t`` with ``x_i^t >= j`` (the smallest grid value
    when no solution reaches level ``j``).
    """
    sfm_solver = sfm_solver or exhaustive_sfm
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    d = oracle.domain
    pts = np.empty((t_grid.size, d.n), dtype=int)
    for s, t in enumerate(t_grid):
        x, _ = sfm_solver(ModularShift(oracle, sep.deriv(t)))
        pts[s] = x
        if s and np.any(pts[s] > pts[s - 1]):
            raise SweepMonotonicityError(
                f"solution at t={t} is not below the solution at t={t_grid[s - 1]}")
    rho = np.empty(d.r)
    for e in range(d.r):
        i, j = d.block_of[e], d.level_of[e]
        reach = np.flatnonzero(pts[:, i] >= j)
        rho[e] = t_grid[reach[-1]] if reach.size else t_grid[0]
    return SweepResult(t_grid, pts, rho)


def prox_objective(oracle: ValueOracle, sep, rho) -> float:
    """``h(rho) + sum_e a_e(rho_e)``."""
    from ..extension import evaluate_extension

    return evaluate_extension(oracle, rho) + sep.value(rho)
