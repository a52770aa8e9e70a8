"""Frank-Wolfe on the base polytope for the separable quadratic problem.

The concave dual ``f(w) = H(0) + min_rho <rho, w> + sum a(rho)`` (minimum over
nonincreasing blocks) is maximized over the convex hull of greedy vertices.  Its
gradient is the primal candidate ``rho(w)``, computed by weighted PAVA, and the
linear maximization oracle is the greedy algorithm at ``rho(w)``.
"""
from __future__ import annotations

import time

import numpy as np

from ..domain import ValueOracle
from ..duality import dual_value_B
from ..extension import greedy
from ..vectors import DualPoint
from .config import IterateLog, SolveResult, SolverConfig
from .separable import SeparableQuadratic

DROP_WEIGHT = 1e-14


class ActiveSet:
    """Greedy vertices with convex weights; ``w`` is always rebuilt from the weights."""

    def __init__(self, r: int):
        self.vertices = np.empty((0, r))
        self.weights = np.empty(0)
        self.orderings = []
        self._index = {}

    def __len__(self):
        return len(self.orderings)

    def find_or_add(self, vec, ordering) -> int:
        key = ordering.key
        if key in self._index:
            return self._index[key]
        self.vertices = np.vstack([self.vertices, vec[None, :]])
        self.weights = np.append(self.weights, 0.0)
        self.orderings.append(ordering)
        self._index[key] = len(self.orderings) - 1
        return self._index[key]

    def prune(self) -> None:
        keep = self.weights >= DROP_WEIGHT
        if np.all(keep):
            return
        self.vertices = self.vertices[keep]
        self.weights = self.weights[keep] / self.weights[keep].sum()
        self.orderings = [o for o, k in zip(self.orderings, keep) if k]
        self._index = {o.key: i for i, o in enumerate(self.orderings)}

    def point(self) -> np.ndarray:
        return self.weights @ self.vertices

    def dual_point(self, domain) -> DualPoint:
        return DualPoint(domain, self.point(),
                         [(float(a), o) for a, o in zip(self.weights, self.orderings)])


def _step(variant, it, rho, d, curv_inv, gmax=1.0):
    if variant == "classic":
        return 2.0 / (it + 2.0)
    quad = float(np.dot(d * d, curv_inv))
    if quad <= 0.0:
        return 0.0
    # maximizer of the quadratic model along d, clipped to the feasible range
    return float(np.clip(np.dot(rho, d) / quad, 0.0, gmax))


def prox_quadratic(oracle: ValueOracle, sep: SeparableQuadratic,
                   config: SolverConfig = SolverConfig(), sfm_log: bool = False):
    """Frank-Wolfe (classic, line-search or pairwise) on the dual of the prox problem.

    Returns ``(rho, w, log, extra)`` where ``log`` tracks the prox objective
    (best primal ``h(rho) + sum a(rho)``, best dual ``f(w)``) and ``extra`` holds
    the submodular-minimization log and best point when ``sfm_log`` is set.
    """
    dom = oracle.domain
    start = time.perf_counter()
    ev0 = oracle.evals
    variant = config.fw_variant
    curv_inv = 1.0 / sep.curvatures

    active = ActiveSet(dom.r)
    rho = sep.gradient_map(np.zeros(dom.r))
    out = greedy(oracle, rho)
    h0 = float(out.chain_values[0])
    first = active.find_or_add(out.w.flat, out.ordering)
    active.weights[first] = 1.0
    w = active.point()

    log = IterateLog()
    sfm = IterateLog() if sfm_log else None
    best_primal, best_dual = np.inf, -np.inf
    best_rho = rho
    sfm_primal, sfm_point = np.inf, None
    sfm_dual, sfm_w = -np.inf, None
    status = "max_iter"
    for it in range(config.max_iter):
        if oracle.evals - ev0 + dom.r + 1 > config.eval_budget:
            status = "budget"
            break
        rho = sep.gradient_map(w)
        out = greedy(oracle, rho)
        reg = sep.value(rho)
        primal = out.value + reg
        dual = h0 + float(np.dot(rho, w)) + reg
        if primal < best_primal:
            best_primal, best_rho = primal, rho
        best_dual = max(best_dual, dual)
        elapsed = 1000.0 * (time.perf_counter() - start)
        log.append(it, best_primal, best_dual, oracle.evals - ev0, elapsed)
        done = best_primal - best_dual <= config.tol
        if sfm is not None:
            if out.best_value < sfm_primal:
                sfm_primal, sfm_point = out.best_value, out.best_point
            sd = h0 + dual_value_B(w, dom)
            if sd > sfm_dual:
                sfm_dual, sfm_w = sd, active.dual_point(dom)
            sfm.append(it, sfm_primal, sfm_dual, oracle.evals - ev0, elapsed)
            done = sfm_primal - sfm_dual <= config.tol
        if done:
            status = "converged"
            break

        s = out.w.flat
        si = active.find_or_add(s, out.ordering)
        if variant == "pairwise":
            # away vertex: the active vertex worst aligned with the gradient
            vi = int(np.argmin(active.vertices @ rho))
            d = s - active.vertices[vi]
            gamma = _step(variant, it, rho, d, curv_inv, active.weights[vi])
            active.weights[si] += gamma
            active.weights[vi] -= gamma
        else:
            d = s - w
            gamma = _step(variant, it, rho, d, curv_inv, 1.0)
            active.weights *= 1.0 - gamma
            active.weights[si] += gamma
        active.weights = np.clip(active.weights, 0.0, None)
        active.prune()
        w = active.point()

    extra = {"sfm_log": sfm, "sfm_point": sfm_point, "sfm_value": sfm_primal,
             "sfm_w": sfm_w, "status": status, "h0": h0}
    return best_rho, active.dual_point(dom), log, extra


def minimize_frankwolfe(oracle: ValueOracle, config: SolverConfig = SolverConfig()) -> SolveResult:
    """Minimize ``H`` through the prox problem ``min h(rho) + ||rho||^2 / 2``.

    Every greedy call at the current ``rho(w)`` scans all thresholdings of ``rho``
    and so yields a rounded primal candidate; the certified dual value comes from
    the current base-polytope point ``w``.  Stops when that gap is within
    ``config.tol``.
    """
    sep = SeparableQuadratic.unit(oracle.domain)
    rho, w, prox_log, extra = prox_quadratic(oracle, sep, config, sfm_log=True)
    return SolveResult(point=extra["sfm_point"], value=float(extra["sfm_value"]),
                       log=extra["sfm_log"], rho=rho, w=extra["sfm_w"],
                       status=extra["status"], prox_log=prox_log)
