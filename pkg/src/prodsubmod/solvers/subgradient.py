"""Projected subgradient descent on the extension over feasible ``rho``."""
from __future__ import annotations

import time

import numpy as np
from scipy.optimize import linprog

from ..domain import ValueOracle
from ..duality import dual_value_B
from ..extension import greedy
from ..isotonic import project_blocks
from ..vectors import DualPoint, VertexAverage
from .config import IterateLog, SolveResult, SolverConfig


def best_vertex_combination(domain, orderings, vertices):
    """Convex weights on ``vertices`` maximizing ``sum_i min_x v_i(x)`` (a small LP).

    Variables are the weights ``lam`` and one epigraph variable ``u_i <= 0`` per
    block; each cumulative sum of the combined vertex bounds ``u_i`` from above.
    """
    m, r = vertices.shape
    n = domain.n
    cum = np.empty_like(vertices)
    for a, b in zip(domain.offsets[:-1], domain.offsets[1:]):
        cum[:, a:b] = np.cumsum(vertices[:, a:b], axis=1)
    # rows: u_{block(e)} - sum_m lam_m cum[m, e] <= 0
    a_ub = np.zeros((r, m + n))
    a_ub[:, :m] = -cum.T
    a_ub[np.arange(r), m + domain.block_of] = 1.0
    c = np.concatenate([np.zeros(m), -np.ones(n)])
    a_eq = np.concatenate([np.ones(m), np.zeros(n)])[None, :]
    bounds = [(0, None)] * m + [(None, 0)] * n
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(r), A_eq=a_eq, b_eq=[1.0], bounds=bounds,
                  method="highs")
    if res.status != 0:
        return None
    lam = np.clip(res.x[:m], 0.0, None)
    lam[lam < 1e-12] = 0.0
    lam /= lam.sum()
    keep = np.flatnonzero(lam)
    w = lam[keep] @ vertices[keep]
    return DualPoint(domain, w, [(float(lam[i]), orderings[i]) for i in keep])


def _preconditioner(oracle: ValueOracle, enabled: bool) -> np.ndarray:
    d = oracle.domain
    if not enabled:
        return np.ones(d.r)
    lip = np.where(oracle.lipschitz > 0, oracle.lipschitz, 1.0)
    scale = 1.0 / (np.array(d.k) * lip)
    scale /= scale.max()
    return scale[d.block_of]


def minimize_subgradient(oracle: ValueOracle, config: SolverConfig = SolverConfig(),
                         rho0=None) -> SolveResult:
    """Minimize ``H`` by projected subgradient steps on the extension.

    Each iteration calls the greedy algorithm at ``rho`` (subgradient, extension
    value and the best point of the chain), folds the vertex into the uniform
    average that serves as dual candidate, and projects
    ``rho - step * precond * w`` back onto nonincreasing blocks in [0, 1].
    """
    d = oracle.domain
    start = time.perf_counter()
    ev0 = oracle.evals
    rng = np.random.default_rng(config.seed)
    rho = np.full(d.r, 0.5) if rho0 is None else d.flatten(rho0)
    rho = project_blocks(rho, d.offsets)
    precond = _preconditioner(oracle, config.precondition)
    if config.step_size is not None:
        c_decay = config.step_size
    else:
        # diameter over gradient bound, the textbook constant for c / sqrt(t)
        c_decay = np.sqrt(np.sum(d.k)) / max(np.sqrt(np.sum(np.array(d.k) * oracle.lipschitz ** 2)), 1e-12)

    avg = VertexAverage(d)
    last_seen = {}
    log = IterateLog()
    best_primal, best_point = np.inf, None
    best_dual, best_w = -np.inf, None
    h0 = None
    status = "max_iter"
    it = 0
    for it in range(1, config.max_iter + 1):
        if oracle.evals - ev0 + d.r + 1 > config.eval_budget:
            status = "budget"
            break
        out = greedy(oracle, rho, seed=rng)
        if h0 is None:
            h0 = float(out.chain_values[0])
        if out.best_value < best_primal:
            best_primal, best_point = out.best_value, out.best_point
        avg.add(out.w.flat, out.ordering)
        last_seen[out.ordering.key] = it

        dual_avg = h0 + dual_value_B(avg.flat, d)
        if dual_avg > best_dual:
            best_dual, best_w = dual_avg, avg.dual_point()
        refine_now = config.dual_refine_every and (
            _on_schedule(it, config.dual_refine_every) or it == config.max_iter)
        if refine_now and best_primal - best_dual > config.tol:
            cand = _refine(avg, last_seen, config.refine_max_vertices)
            if cand is not None:
                dual_ref = h0 + dual_value_B(cand.flat, d)
                if dual_ref > best_dual:
                    best_dual, best_w = dual_ref, cand

        log.append(it, best_primal, best_dual, oracle.evals - ev0,
                   1000.0 * (time.perf_counter() - start))
        if best_primal - best_dual <= config.tol:
            status = "converged"
            break

        w = out.w.flat
        denom = float(np.dot(precond * w, w))
        if denom <= 0.0:
            # zero subgradient: rho minimizes the extension already
            continue
        if config.step_rule == "fixed":
            step = config.step_size
        elif config.step_rule == "polyak" and out.value - best_dual > 0:
            step = (out.value - best_dual) / denom
        else:
            step = c_decay / np.sqrt(it)
        rho = project_blocks(rho - step * precond * w, d.offsets)

    if best_w is None:
        best_w = DualPoint(d, np.zeros(d.r), None)
    return SolveResult(point=best_point, value=float(best_primal), log=log, rho=rho,
                       w=best_w, status=status)


def _on_schedule(it: int, every: int) -> bool:
    # every, 2 every, 4 every, ...: the LP grows with the vertex count, so refine less often
    q, rem = divmod(it, every)
    return rem == 0 and q & (q - 1) == 0


def _refine(avg: VertexAverage, last_seen: dict, max_vertices: int):
    orderings, verts = avg.vertices()
    if len(orderings) > max_vertices:
        recent = np.argsort([-last_seen[o.key] for o in orderings], kind="stable")[:max_vertices]
        orderings = [orderings[i] for i in recent]
        verts = verts[recent]
    return best_vertex_combination(avg.domain, orderings, verts)
