"""Library of example submodular functions evaluated on grids.

Continuous examples map index ``j`` of a block with ``k_i`` values to the
coordinate ``lo + j (hi - lo) / (k_i - 1)``.
"""
from __future__ import annotations

import itertools
from typing import Callable, Optional

import numpy as np

from .domain import (LIPSCHITZ_AUDIT_POINTS, ProductDomain, SetFunction, ValueOracle,
                     table_oracle)
from .errors import BudgetExceededError

EXAMPLES = ("modular", "figure1", "coupling", "denoise", "random", "meanfield", "lovasz-ext",
            "multilinear-ext")

MAX_MULTILINEAR_N = 16

# exhaustive minimum of figure1 on the default 51 x 51 grid over [-1, 1]^2
FIGURE1_K51_MINIMUM = {"point": (42, 42), "value": -1.9997099760225596}


class UnknownExampleError(KeyError):
    pass


def _grid_oracle(fn: Callable[[np.ndarray], np.ndarray], domain: ProductDomain,
                 lipschitz=None, name: str = "") -> ValueOracle:
    def func(pts):
        return fn(domain.coordinates(pts))

    return ValueOracle(func, domain, lipschitz=lipschitz, name=name)


def figure1_value(x) -> np.ndarray:
    """Two-variable function with several local minima, maxima and saddle points."""
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return (7.0 / 20.0 * (x1 - x2) ** 2
            - np.exp(-4.0 * (x1 - 2.0 / 3.0) ** 2)
            - 3.0 / 5.0 * np.exp(-4.0 * (x1 + 2.0 / 3.0) ** 2)
            - np.exp(-4.0 * (x2 - 2.0 / 3.0) ** 2)
            - np.exp(-4.0 * (x2 + 2.0 / 3.0) ** 2))


def figure1(k=51, lo: float = -1.0, hi: float = 1.0):
    ks = [k, k] if np.isscalar(k) else list(k)
    domain = ProductDomain.uniform(ks, lo, hi)
    return _grid_oracle(figure1_value, domain, name="figure1"), domain


def modular(coef=None, k=None, unary=None):
    """``H(x) = sum_i c_i x_i`` on integer indices, or ``sum_i u_i[x_i]`` from tables."""
    if unary is not None:
        tables = [np.asarray(u, dtype=float) for u in unary]
        domain = ProductDomain([t.size for t in tables])
    else:
        coef = np.asarray([1.0, 1.0] if coef is None else coef, dtype=float)
        k = [2] * coef.size if k is None else ([int(k)] * coef.size if np.isscalar(k) else list(k))
        domain = ProductDomain(k)
        tables = [c * np.arange(ki, dtype=float) for c, ki in zip(coef, domain.k)]

    def func(pts):
        out = np.zeros(len(pts))
        for i, t in enumerate(tables):
            out += t[pts[:, i]]
        return out

    lip = [float(np.max(np.abs(np.diff(t)))) for t in tables]
    return ValueOracle(func, domain, lipschitz=lip, name="modular"), domain


_PHI = {
    "square": lambda d: d ** 2,
    "abs": np.abs,
    "huber": lambda d: np.where(np.abs(d) <= 0.5, d ** 2, np.abs(d) - 0.25),
}


def coupling(n: int = 2, k=5, phi: str = "square", edges=None, weights=None,
             unary_scale: float = 0.0, seed=0, lo: float = -1.0, hi: float = 1.0):
    """``sum_{(i,j)} w_ij phi(x_i - x_j)`` plus optional random unary terms, phi convex."""
    if phi not in _PHI:
        raise ValueError(f"phi must be one of {sorted(_PHI)}")
    ks = [int(k)] * n if np.isscalar(k) else list(k)
    domain = ProductDomain.uniform(ks, lo, hi)
    edges = [(i, i + 1) for i in range(n - 1)] if edges is None else [tuple(e) for e in edges]
    weights = np.ones(len(edges)) if weights is None else np.asarray(weights, dtype=float)
    if np.any(weights < 0):
        raise ValueError("coupling weights must be nonnegative")
    rng = np.random.default_rng(seed)
    unary = [unary_scale * rng.standard_normal(ki) for ki in ks]
    f = _PHI[phi]

    def func(pts):
        x = domain.coordinates(pts)
        out = np.zeros(len(pts))
        for (i, j), wij in zip(edges, weights):
            out += wij * f(x[:, i] - x[:, j])
        for i, u in enumerate(unary):
            out += u[pts[:, i]]
        return out

    lip = None if domain.size <= LIPSCHITZ_AUDIT_POINTS else _coupling_bounds(domain, edges, weights, f, unary)
    return ValueOracle(func, domain, lipschitz=lip, name="coupling"), domain


def _coupling_bounds(domain, edges, weights, f, unary):
    bounds = np.array([float(np.max(np.abs(np.diff(u)))) for u in unary])
    for (i, j), wij in zip(edges, weights):
        gi, gj = domain.grid[i], domain.grid[j]
        d = f(gi[:, None] - gj[None, :])
        bounds[i] += wij * float(np.max(np.abs(np.diff(d, axis=0))))
        bounds[j] += wij * float(np.max(np.abs(np.diff(d, axis=1))))
    return bounds


def denoise(z, lam: float = 0.25, mu: float = 2.0, alpha: float = 0.125, k: int = 50,
            lo: float = -1.0, hi: float = 1.0):
    """``1/2 sum (x_i - z_i)^2 + lam sum |x_i|^alpha + mu sum (x_i - x_{i+1})^2`` on a grid."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size < 1:
        raise ValueError("z must be a nonempty vector")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if lam < 0 or mu < 0:
        raise ValueError("lam and mu must be nonnegative")
    n = z.size
    domain = ProductDomain.uniform([k] * n, lo, hi)
    g = domain.grid[0]

    def fn(x):
        # |0|^alpha evaluates to 0 for alpha > 0
        out = 0.5 * np.sum((x - z) ** 2, axis=1) + lam * np.sum(np.abs(x) ** alpha, axis=1)
        if n > 1:
            out += mu * np.sum((x[:, :-1] - x[:, 1:]) ** 2, axis=1)
        return out

    # unit-step bounds: exact for the separable part, worst neighbour for the coupling
    sep = 0.5 * (g[None, :] - z[:, None]) ** 2 + lam * np.abs(g[None, :]) ** alpha
    bounds = np.max(np.abs(np.diff(sep, axis=1)), axis=1)
    pair = mu * (g[:, None] - g[None, :]) ** 2
    step = float(np.max(np.abs(np.diff(pair, axis=0))))
    degree = np.full(n, 2.0)
    degree[0] = degree[-1] = 1.0
    if n == 1:
        degree[:] = 0.0
    bounds = bounds + degree * step
    return _grid_oracle(fn, domain, lipschitz=bounds, name="denoise"), domain


# -- set functions ---------------------------------------------------------------

def named_set_function(name: str, n: int, seed=0) -> SetFunction:
    """A few standard submodular set functions: cardinality, min1, sqrt, cut."""
    if name == "cardinality":
        return SetFunction(lambda z: z.sum(axis=1).astype(float), n, name)
    if name == "min1":
        return SetFunction(lambda z: np.minimum(z.sum(axis=1), 1).astype(float), n, name)
    if name == "sqrt":
        return SetFunction(lambda z: np.sqrt(z.sum(axis=1)), n, name)
    if name == "cut":
        rng = np.random.default_rng(seed)
        wts = np.triu(rng.random((n, n)), 1)
        wts = wts + wts.T

        def cut(z):
            z = z.astype(float)
            return np.einsum("mi,ij,mj->m", z, wts, 1.0 - z)

        return SetFunction(cut, n, name)
    raise UnknownExampleError(f"unknown set function {name!r}")


def all_subsets(n: int) -> np.ndarray:
    return np.array(list(itertools.product([0, 1], repeat=n)), dtype=int)


def lovasz_value(g: SetFunction, p) -> np.ndarray:
    """Lovász extension of ``g`` at the rows of ``p`` (sorting formula)."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    m, n = p.shape
    order = np.argsort(-p, axis=1, kind="stable")
    sets = np.zeros((m, n + 1, n), dtype=int)
    for s in range(1, n + 1):
        sets[:, s] = sets[:, s - 1]
        sets[np.arange(m), s, order[:, s - 1]] = 1
    vals = g(sets.reshape(-1, n)).reshape(m, n + 1)
    ps = np.take_along_axis(p, order, axis=1)
    return vals[:, 0] + np.sum(ps * np.diff(vals, axis=1), axis=1)


def multilinear_value(g: SetFunction, p, _cache=None) -> np.ndarray:
    """``E[g(y)]`` with independent ``y_i ~ Bernoulli(p_i)`` by exact summation."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    n = p.shape[1]
    if n > MAX_MULTILINEAR_N:
        raise BudgetExceededError(f"2^{n} terms exceed the multilinear budget")
    subsets = all_subsets(n) if _cache is None else _cache[0]
    gv = g(subsets) if _cache is None else _cache[1]
    # probability of each subset under each row of p
    probs = np.prod(np.where(subsets[None, :, :] == 1, p[:, None, :], 1.0 - p[:, None, :]), axis=2)
    return probs @ gv


def lovasz_extension_oracle(g: SetFunction, k: int, n: Optional[int] = None):
    """Lovász extension of ``g`` sampled on ``{0, ..., k-1}^n`` mapped to ``[0, 1]^n``."""
    n = g.n if n is None else n
    domain = ProductDomain.uniform([k] * n, 0.0, 1.0)
    return _grid_oracle(lambda x: lovasz_value(g, x), domain,
                        lipschitz=_lipschitz_or_none(domain), name=f"lovasz[{g.name}]"), domain


def multilinear_extension_oracle(g: SetFunction, k: int, n: Optional[int] = None):
    """Multilinear extension of ``g`` sampled on ``{0, ..., k-1}^n`` in ``[0, 1]^n``."""
    n = g.n if n is None else n
    if n > MAX_MULTILINEAR_N:
        raise BudgetExceededError(f"2^{n} terms exceed the multilinear budget")
    domain = ProductDomain.uniform([k] * n, 0.0, 1.0)
    subsets = all_subsets(n)
    cache = (subsets, g(subsets))
    return _grid_oracle(lambda x: multilinear_value(g, x, cache), domain,
                        lipschitz=_lipschitz_or_none(domain), name=f"multilinear[{g.name}]"), domain


def _lipschitz_or_none(domain):
    if domain.size > LIPSCHITZ_AUDIT_POINTS:
        raise BudgetExceededError("grid too large for the Lipschitz audit; supply bounds")
    return None


def _entropy(x):
    # 0 log 0 = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, (1 - x) * np.log(np.where(x < 1, 1 - x, 1.0)), 0.0)
    return a + b


def meanfield(g: SetFunction, k: int = 11):
    """Mean-field objective: negative entropies plus the multilinear extension of ``g``."""
    n = g.n
    if n > MAX_MULTILINEAR_N:
        raise BudgetExceededError(f"2^{n} terms exceed the multilinear budget")
    domain = ProductDomain.uniform([k] * n, 0.0, 1.0)
    subsets = all_subsets(n)
    cache = (subsets, g(subsets))

    def fn(x):
        return np.sum(_entropy(x), axis=1) + multilinear_value(g, x, cache)

    return _grid_oracle(fn, domain, lipschitz=_lipschitz_or_none(domain),
                        name=f"meanfield[{g.name}]"), domain


def random_submodular(n: int = 3, k=4, seed=0):
    """Random dense submodular table: arbitrary unary terms plus submodular couplings.

    Pairwise terms are nonnegative multiples of convex functions of ``x_i - x_j``;
    a concave function of a nonnegative combination adds a global coupling.
    """
    rng = np.random.default_rng(seed)
    ks = [int(k)] * n if np.isscalar(k) else [int(v) for v in k]
    domain = ProductDomain.uniform(ks, 0.0, 1.0)
    pts = domain.all_points()
    x = domain.coordinates(pts)
    vals = np.zeros(len(x))
    for i, ki in enumerate(ks):
        vals += rng.standard_normal(ki)[pts[:, i]]
    for i, j in itertools.combinations(range(n), 2):
        f = _PHI[("square", "abs", "huber")[rng.integers(3)]]
        vals += 2.0 * rng.random() * f(x[:, i] - x[:, j])
    lam = rng.random(n)
    vals += -rng.random() * (x @ lam) ** 2
    oracle = table_oracle(vals.reshape(ks), name=f"random[{seed}]", grid=domain.grid)
    return oracle, oracle.domain


def make_example(name: str, params: Optional[dict] = None):
    """Build ``(oracle, domain)`` for one of :data:`EXAMPLES`."""
    params = dict(params or {})
    if name == "modular":
        return modular(**params)
    if name == "figure1":
        return figure1(**params)
    if name == "coupling":
        return coupling(**params)
    if name == "random":
        return random_submodular(**params)
    if name == "denoise":
        if "z" not in params:
            raise ValueError("denoise needs the observed signal z")
        return denoise(**params)
    if name in ("meanfield", "lovasz-ext", "multilinear-ext"):
        g = params.pop("g", "cut")
        n = int(params.pop("n", 2))
        seed = params.pop("seed", 0)
        if isinstance(g, str):
            g = named_set_function(g, n, seed)
        k = int(params.pop("k", 11))
        if params:
            raise ValueError(f"unexpected parameters {sorted(params)}")
        builder = {"meanfield": meanfield, "lovasz-ext": lovasz_extension_oracle,
                   "multilinear-ext": multilinear_extension_oracle}[name]
        return builder(g, k)
    raise UnknownExampleError(f"unknown example {name!r}; choose from {EXAMPLES}")
