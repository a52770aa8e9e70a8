"""Product domains, the value-oracle contract, restrictions and submodularity checks.

Variables are indexed from 0 and block ``i`` takes the values ``0, ..., k[i] - 1``.
An extension argument (``rho``) or a dual vector (``w``) has one block of length
``k[i] - 1`` per variable; internally these are stored as one flat array of length
``r = sum(k) - n`` with ``ProductDomain.offsets`` giving the block boundaries.
"""
from __future__ import annotations

import itertools
import threading
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import BudgetExceededError, DomainRangeError

# Lipschitz bounds are audited exhaustively below this many grid points.
LIPSCHITZ_AUDIT_POINTS = 250_000
DEFAULT_MAX_POINTS = 2_000_000


class ProductDomain:
    """Product of finite chains ``{0, ..., k_i - 1}`` with optional real coordinates."""

    def __init__(self, k: Sequence[int], grid: Optional[Sequence[Sequence[float]]] = None):
        k = tuple(int(v) for v in k)
        if len(k) < 1:
            raise ValueError("a domain needs at least one block")
        if any(v < 2 for v in k):
            raise ValueError(f"every block size must be >= 2, got {k}")
        self.k = k
        if grid is not None:
            grid = tuple(np.asarray(g, dtype=float) for g in grid)
            if len(grid) != len(k):
                raise ValueError("grid must have one coordinate vector per block")
            for ki, g in zip(k, grid):
                if g.shape != (ki,):
                    raise ValueError("grid vector length must equal its block size")
                if np.any(np.diff(g) <= 0):
                    raise ValueError("grid coordinates must be strictly increasing")
        self.grid = grid
        sizes = np.array(k) - 1
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        # block index of every flat entry, and its 1-based level j
        self.block_of = np.repeat(np.arange(len(k)), sizes)
        self.level_of = np.concatenate([np.arange(1, s + 1) for s in sizes])

    @classmethod
    def uniform(cls, k: Sequence[int], lo: float = 0.0, hi: float = 1.0) -> "ProductDomain":
        """Domain whose block ``i`` maps index ``j`` to ``lo + j (hi - lo) / (k_i - 1)``."""
        return cls(k, [np.linspace(lo, hi, ki) for ki in k])

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def r(self) -> int:
        return int(self.offsets[-1])

    @property
    def size(self) -> int:
        return int(np.prod(np.array(self.k, dtype=object)))

    @property
    def zero(self) -> np.ndarray:
        return np.zeros(self.n, dtype=int)

    @property
    def top(self) -> np.ndarray:
        return np.array(self.k, dtype=int) - 1

    def __eq__(self, other):
        return isinstance(other, ProductDomain) and self.k == other.k

    def __hash__(self):
        return hash(self.k)

    def __repr__(self):
        return f"ProductDomain(k={list(self.k)})"

    def split(self, flat) -> list:
        """Cut a flat length-``r`` vector into its blocks (views)."""
        flat = np.asarray(flat, dtype=float)
        return [flat[self.offsets[i]:self.offsets[i + 1]] for i in range(self.n)]

    def flatten(self, blocks) -> np.ndarray:
        """Accept a flat vector or a list of blocks and return a flat float copy."""
        if isinstance(blocks, np.ndarray) and blocks.ndim == 1:
            flat = blocks.astype(float, copy=True)
        else:
            blocks = list(blocks)
            if len(blocks) != self.n:
                raise ValueError(f"expected {self.n} blocks, got {len(blocks)}")
            for i, b in enumerate(blocks):
                if np.size(b) != self.k[i] - 1:
                    raise ValueError(f"block {i} must have length {self.k[i] - 1}")
            flat = np.concatenate([np.atleast_1d(np.asarray(b, dtype=float)) for b in blocks])
        if flat.shape != (self.r,):
            raise ValueError(f"expected a vector of length {self.r}, got shape {flat.shape}")
        return flat

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return x.shape == (self.n,) and bool(np.all(x >= 0) and np.all(x <= self.top))

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (self.n,) or not np.all(np.equal(np.mod(x, 1), 0)):
            raise DomainRangeError(f"not an integer point of length {self.n}: {x!r}")
        x = x.astype(int)
        if not self.contains(x):
            raise DomainRangeError(f"point {x.tolist()} outside domain {list(self.k)}")
        return x

    def coordinates(self, points) -> np.ndarray:
        """Real coordinates of integer points (identity when no grid is attached)."""
        points = np.asarray(points, dtype=int)
        if self.grid is None:
            return points.astype(float)
        out = np.empty(points.shape, dtype=float)
        for i, g in enumerate(self.grid):
            out[..., i] = g[points[..., i]]
        return out

    def all_points(self, max_points: int = DEFAULT_MAX_POINTS) -> np.ndarray:
        """All points in lexicographic order, as an ``(size, n)`` integer array."""
        if self.size > max_points:
            raise BudgetExceededError(
                f"enumeration of {self.size} points exceeds the cap of {max_points}")
        grids = np.indices(self.k).reshape(self.n, -1).T
        return np.ascontiguousarray(grids)


class ValueOracle:
    """Deterministic function on a product domain, queried by value only.

    ``func`` maps an ``(m, n)`` integer array of points to ``m`` real values.  Each
    point evaluated through :meth:`evaluate` or ``__call__`` adds one to
    :attr:`evals`; the counter is guarded by a lock so concurrent workers may
    share an oracle.
    """

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], domain: ProductDomain,
                 lipschitz=None, name: str = "oracle"):
        self._func = func
        self.domain = domain
        self.name = name
        self._evals = 0
        self._lock = threading.Lock()
        if lipschitz is None:
            if domain.size > LIPSCHITZ_AUDIT_POINTS:
                raise ValueError(
                    "lipschitz bounds must be supplied for domains with more than "
                    f"{LIPSCHITZ_AUDIT_POINTS} points")
            lipschitz = unit_step_bounds(func, domain)
        lipschitz = np.asarray(lipschitz, dtype=float)
        if lipschitz.shape != (domain.n,) or np.any(lipschitz < 0):
            raise ValueError("lipschitz must hold one nonnegative bound per variable")
        self.lipschitz = lipschitz

    def __repr__(self):
        return f"ValueOracle({self.name!r}, k={list(self.domain.k)})"

    @property
    def evals(self) -> int:
        return self._evals

    def reset_counter(self) -> None:
        with self._lock:
            self._evals = 0

    def _count(self, m: int) -> None:
        with self._lock:
            self._evals += m

    def evaluate(self, points) -> np.ndarray:
        """Evaluate a batch of points; counts one evaluation per row."""
        pts = np.asarray(points, dtype=int)
        if pts.ndim == 1:
            pts = pts[None, :]
        self._count(len(pts))
        return np.asarray(self._func(pts), dtype=float).reshape(len(pts))

    def __call__(self, x) -> float:
        return float(self.evaluate(np.asarray(x, dtype=int)[None, :])[0])

    def table(self, max_points: int = DEFAULT_MAX_POINTS) -> np.ndarray:
        """All values as an array of shape ``k`` (counts ``size`` evaluations)."""
        pts = self.domain.all_points(max_points)
        return self.evaluate(pts).reshape(self.domain.k)


def unit_step_bounds(func, domain: ProductDomain) -> np.ndarray:
    """Largest ``|H(x + e_i) - H(x)|`` per variable, by full enumeration (uncounted)."""
    pts = domain.all_points(LIPSCHITZ_AUDIT_POINTS)
    t = np.asarray(func(pts), dtype=float).reshape(domain.k)
    return np.array([float(np.max(np.abs(np.diff(t, axis=i)))) for i in range(domain.n)])


def table_oracle(values, lipschitz=None, name: str = "table", grid=None) -> ValueOracle:
    """Oracle backed by a dense array of function values."""
    values = np.asarray(values, dtype=float)
    domain = ProductDomain(values.shape, grid)

    def func(pts):
        return values[tuple(pts.T)]

    return ValueOracle(func, domain, lipschitz=lipschitz, name=name)


class SetFunction:
    """Function on subsets of ``{0, ..., n-1}`` encoded as 0/1 indicator rows."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], n: int, name: str = "set-function"):
        self._func = func
        self.n = int(n)
        self.name = name

    def __call__(self, z) -> np.ndarray | float:
        z = np.asarray(z, dtype=int)
        if z.ndim == 1:
            return float(np.asarray(self._func(z[None, :]))[0])
        return np.asarray(self._func(z), dtype=float)

    def as_oracle(self, lipschitz=None) -> ValueOracle:
        """View as a value oracle on ``{0, 1}^n``."""
        return ValueOracle(self._func, ProductDomain([2] * self.n), lipschitz=lipschitz,
                           name=self.name)


class RestrictedOracle(ValueOracle):
    """``H`` restricted to the sub-box ``lower <= x <= upper``, re-indexed from 0.

    With ``drop_fixed`` the variables with ``lower_i == upper_i`` are removed from
    the domain and held at their fixed value.  Evaluations are forwarded to the
    parent oracle, so they are counted both here and on the parent.
    """

    def __init__(self, parent: ValueOracle, lower, upper, drop_fixed: bool = False):
        lower = parent.domain.check_point(lower)
        upper = parent.domain.check_point(upper)
        if np.any(lower > upper):
            raise DomainRangeError("lower must be <= upper componentwise")
        self.parent = parent
        self.lower = lower
        self.upper = upper
        free = upper > lower if drop_fixed else np.ones(parent.domain.n, dtype=bool)
        if not np.any(free):
            raise DomainRangeError("the sub-box is a single point")
        k = (upper - lower + 1)[free]
        if np.any(k < 2):
            raise DomainRangeError(
                "every restricted block must keep two values (use drop_fixed=True)")
        self.free = np.flatnonzero(free)
        grid = None
        if parent.domain.grid is not None:
            grid = [parent.domain.grid[i][lower[i]:upper[i] + 1] for i in self.free]
        ValueOracle.__init__(self, self._shifted, ProductDomain(k, grid),
                             lipschitz=parent.lipschitz[self.free].copy(),
                             name=f"{parent.name}|restricted")

    def embed(self, pts) -> np.ndarray:
        """Map points of the sub-box back to points of the parent domain."""
        pts = np.asarray(pts, dtype=int)
        full = np.broadcast_to(self.lower, pts.shape[:-1] + (self.parent.domain.n,)).copy()
        full[..., self.free] += pts
        return full

    def _shifted(self, pts):
        return self.parent.evaluate(self.embed(pts))


def restrict(oracle: ValueOracle, lower, upper, drop_fixed: bool = False) -> ValueOracle:
    """Restrict ``oracle`` to a sub-box; restrictions of restrictions collapse to one offset."""
    lower = oracle.domain.check_point(lower)
    upper = oracle.domain.check_point(upper)
    if isinstance(oracle, RestrictedOracle):
        return RestrictedOracle(oracle.parent, oracle.embed(lower), oracle.embed(upper),
                                drop_fixed=drop_fixed)
    return RestrictedOracle(oracle, lower, upper, drop_fixed=drop_fixed)


class ModularShift(ValueOracle):
    """``H(x) + sum_i sum_{j <= x_i} m_i(j)`` for a flat modular weight vector ``m``."""

    def __init__(self, base: ValueOracle, weights):
        self.base = base
        d = base.domain
        weights = d.flatten(weights)
        self.weights = weights
        # cumulative tables with a leading zero per block
        self._cum = [np.concatenate([[0.0], np.cumsum(b)]) for b in d.split(weights)]
        lip = base.lipschitz + np.array([np.max(np.abs(b)) if b.size else 0.0
                                         for b in d.split(weights)])
        ValueOracle.__init__(self, self._shifted, d, lipschitz=lip, name=f"{base.name}+modular")

    def _shifted(self, pts):
        vals = self.base.evaluate(pts)
        for i, c in enumerate(self._cum):
            vals = vals + c[pts[:, i]]
        return vals


class SubmodularityViolation(NamedTuple):
    x: tuple
    i: int
    j: int
    excess: float


def is_submodular_bruteforce(oracle: ValueOracle, domain: Optional[ProductDomain] = None,
                             tol: float = 1e-9, max_points: int = DEFAULT_MAX_POINTS):
    """Check ``H(x+e_i) + H(x+e_j) >= H(x) + H(x+e_i+e_j) - tol`` everywhere.

    Returns ``(True, None)`` or ``(False, SubmodularityViolation)`` where the witness
    has the lexicographically smallest ``x`` (then smallest ``(i, j)``).  Indices are
    0-based.
    """
    domain = domain or oracle.domain
    if domain.size > max_points:
        raise BudgetExceededError(
            f"checking {domain.size} points exceeds the cap of {max_points}")
    t = oracle.table(max_points)
    best = None
    for i, j in itertools.combinations(range(domain.n), 2):
        a = t
        # excess = H(x) + H(x+ei+ej) - H(x+ei) - H(x+ej) on x with room in i and j
        s00 = [slice(None)] * domain.n
        s00[i] = slice(0, -1)
        s00[j] = slice(0, -1)
        s10 = list(s00)
        s10[i] = slice(1, None)
        s01 = list(s00)
        s01[j] = slice(1, None)
        s11 = list(s10)
        s11[j] = slice(1, None)
        excess = a[tuple(s00)] + a[tuple(s11)] - a[tuple(s10)] - a[tuple(s01)]
        bad = np.argwhere(excess > tol)
        if len(bad):
            x = tuple(int(v) for v in bad[0])  # argwhere is in C (lexicographic) order
            cand = (x, i, j, float(excess[x]))
            if best is None or cand[0] < best[0]:
                best = cand
    if best is None:
        return True, None
    return False, SubmodularityViolation(*best)
