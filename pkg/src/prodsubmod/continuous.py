"""Grid discretization of Lipschitz functions on boxes and the matching accuracy planner."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .domain import ProductDomain, ValueOracle
from .errors import NonFiniteValueError


@dataclass
class BoxSpec:
    """Box ``prod [lo_i, hi_i]`` with an l-infinity Lipschitz constant ``G``.

    ``B`` is the common edge length; it defaults to the longest edge.
    """

    lo: np.ndarray
    hi: np.ndarray
    G: float
    B: Optional[float] = None

    def __post_init__(self):
        self.lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if self.lo.shape != self.hi.shape:
            raise ValueError("lo and hi must have the same length")
        if np.any(self.lo >= self.hi):
            raise ValueError("every interval needs lo < hi")
        if not self.G >= 0:
            raise ValueError("G must be nonnegative")
        if self.B is None:
            self.B = float(np.max(self.hi - self.lo))

    @classmethod
    def cube(cls, n: int, lo: float, hi: float, G: float) -> "BoxSpec":
        return cls(np.full(n, lo), np.full(n, hi), G)

    @property
    def n(self) -> int:
        return self.lo.size


def _per_variable(k, n) -> list:
    ks = [int(k)] * n if np.isscalar(k) else [int(v) for v in k]
    if len(ks) != n:
        raise ValueError("need one grid size per variable")
    if min(ks) < 2:
        raise ValueError("every grid size must be >= 2")
    return ks


def discretize(f: Callable[[np.ndarray], np.ndarray], spec: BoxSpec, k, name: str = "grid"):
    """Sample ``f`` on a uniform grid of the box.

    ``f`` maps an ``(m, n)`` array of real coordinates to ``m`` values.  The oracle's
    unit-step bounds are ``G (hi_i - lo_i) / (k_i - 1)``.
    """
    ks = _per_variable(k, spec.n)
    domain = ProductDomain(ks, [np.linspace(a, b, m) for a, b, m in zip(spec.lo, spec.hi, ks)])

    def func(pts):
        vals = np.asarray(f(domain.coordinates(pts)), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteValueError(f"{name}: non-finite sample")
        return vals

    lip = spec.G * (spec.hi - spec.lo) / (np.array(ks) - 1)
    return ValueOracle(func, domain, lipschitz=lip, name=name), domain


def estimate_lipschitz(f: Callable[[np.ndarray], np.ndarray], lo: Sequence[float],
                       hi: Sequence[float], k: int = 201) -> float:
    """Largest finite-difference slope of ``f`` along grid axes of a dense grid.

    For a function that is G-Lipschitz in the l-infinity norm each axis slope is at
    most G; the estimate is a lower bound on G that becomes tight as ``k`` grows.
    """
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    axes = [np.linspace(a, b, k) for a, b in zip(lo, hi)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = np.asarray(f(mesh.reshape(-1, lo.size)), dtype=float).reshape(mesh.shape[:-1])
    h = (hi - lo) / (k - 1)
    return float(max(np.max(np.abs(np.diff(vals, axis=i))) / h[i] for i in range(lo.size)))


def _ceil(x: float) -> int:
    # absorb rounding noise such as 2 / 0.2 = 10.000000000000002
    return math.ceil(x * (1.0 - 1e-12))


class AccuracyPlan(NamedTuple):
    k: int
    t: int
    evals: int


def plan_accuracy(G: float, B: float, n: int, eps: float) -> AccuracyPlan:
    """Grid size and iteration count for global accuracy ``eps``.

    Half of ``eps`` goes to the discretization error ``GB/k`` and half to the
    subgradient bound ``GBn / sqrt(t)``, so ``k = ceil(2GB/eps)`` and
    ``t = ceil((2GBn/eps)^2)``.  Each iteration costs about ``n k`` evaluations.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    k = max(2, _ceil(2.0 * G * B / eps))
    t = max(1, _ceil((2.0 * G * B * n / eps) ** 2))
    return AccuracyPlan(k, t, t * n * k)
