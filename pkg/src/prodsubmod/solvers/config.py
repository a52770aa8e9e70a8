"""Solver configuration, iterate logs and result containers."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..vectors import DualPoint

STEP_RULES = ("polyak", "fixed", "decaying")
FW_VARIANTS = ("classic", "linesearch", "pairwise")


@dataclass
class SolverConfig:
    """Settings shared by the subgradient and Frank-Wolfe solvers.

    ``step_size`` is the constant for ``fixed`` steps and the ``c`` in ``c / sqrt(t)``
    for ``decaying`` steps (a default is derived from the domain when ``None``).
    The subgradient method re-weights the greedy vertices it has seen to maximize
    the certified dual value at iterations ``dual_refine_every * 2^j`` and at the
    last iteration (0 disables).
    """

    max_iter: int = 1000
    tol: float = 1e-8
    step_rule: str = "polyak"
    step_size: Optional[float] = None
    precondition: bool = False
    fw_variant: str = "pairwise"
    seed: Optional[int] = 0
    eval_budget: int = 10**9
    dual_refine_every: int = 25
    refine_max_vertices: int = 400

    def __post_init__(self):
        if self.max_iter <= 0 or self.eval_budget <= 0:
            raise ValueError("max_iter and eval_budget must be positive")
        if self.step_rule not in STEP_RULES:
            raise ValueError(f"step_rule must be one of {STEP_RULES}")
        if self.fw_variant not in FW_VARIANTS:
            raise ValueError(f"fw_variant must be one of {FW_VARIANTS}")
        if self.step_rule == "fixed" and not self.step_size:
            raise ValueError("a fixed step rule needs step_size")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")


LOG_COLUMNS = ("iter", "primal", "dual", "gap", "evals", "ms")


@dataclass
class IterateLog:
    """Per-iteration best-so-far primal, dual and certified gap."""

    iters: list = field(default_factory=list)
    primal: list = field(default_factory=list)
    dual: list = field(default_factory=list)
    gap: list = field(default_factory=list)
    evals: list = field(default_factory=list)
    ms: list = field(default_factory=list)

    def append(self, it, primal, dual, evals, ms):
        self.iters.append(int(it))
        self.primal.append(float(primal))
        self.dual.append(float(dual))
        self.gap.append(float(primal) - float(dual))
        self.evals.append(int(evals))
        self.ms.append(float(ms))

    def __len__(self):
        return len(self.iters)

    @property
    def last(self) -> dict:
        return {c: getattr(self, "iters" if c == "iter" else c)[-1] for c in LOG_COLUMNS}

    def as_arrays(self) -> dict:
        return {c: np.asarray(getattr(self, "iters" if c == "iter" else c)) for c in LOG_COLUMNS}

    def to_csv(self, timing: bool = True) -> str:
        """CSV text with columns ``iter,primal,dual,gap,evals,ms``.

        With ``timing=False`` the ``ms`` column is written as 0 so that repeated
        runs produce identical bytes.
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(LOG_COLUMNS)
        for row in zip(self.iters, self.primal, self.dual, self.gap, self.evals, self.ms):
            it, p, d, g, e, ms = row
            writer.writerow([it, repr(p), repr(d), repr(g), e, f"{ms if timing else 0.0:.3f}"])
        return buf.getvalue()


@dataclass
class SolveResult:
    """Outcome of a minimization run.

    ``status`` is ``"converged"`` (certified gap within tolerance), ``"max_iter"`` or
    ``"budget"`` (evaluation budget exhausted; best-so-far values are returned).
    """

    point: np.ndarray
    value: float
    log: IterateLog
    rho: np.ndarray
    w: DualPoint
    status: str
    prox_log: Optional[IterateLog] = None

    @property
    def gap(self) -> float:
        return self.log.gap[-1]

    @property
    def budget_exhausted(self) -> bool:
        return self.status == "budget"

    def __iter__(self):
        return iter((self.point, self.value, self.log, self.rho, self.w))
