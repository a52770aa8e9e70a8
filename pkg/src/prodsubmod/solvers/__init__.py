"""Minimization algorithms built on the greedy algorithm and its base polytope."""
from .config import IterateLog, SolveResult, SolverConfig
from .frankwolfe import minimize_frankwolfe, prox_quadratic
from .ring import ring_family_reduce
from .separable import (SeparableConvex, SeparableQuadratic, divide_and_conquer,
                        exhaustive_sfm, parametric_sweep, prox_objective)
from .subgradient import minimize_subgradient

__all__ = [
    "IterateLog", "SolveResult", "SolverConfig", "minimize_frankwolfe", "prox_quadratic",
    "ring_family_reduce", "SeparableConvex", "SeparableQuadratic", "divide_and_conquer",
    "exhaustive_sfm", "parametric_sweep", "prox_objective", "minimize_subgradient",
]
