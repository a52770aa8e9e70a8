"""Minimization of submodular functions on products of finite chains.

Functions are given by value oracles on grids ``prod {0, ..., k_i - 1}``.  The
package evaluates their convex extension on blockwise nonincreasing vectors
through the greedy algorithm, certifies optimality with base-polytope dual
points, and minimizes with projected subgradient or Frank-Wolfe methods.
"""
__version__ = "0.1.0"

from .bruteforce import (AuditBudget, convexity_probe, exhaustive_min,
                         extension_by_breakpoint_integration, random_feasible_rho)
from .continuous import BoxSpec, discretize, estimate_lipschitz, plan_accuracy
from .domain import (ModularShift, ProductDomain, SetFunction, ValueOracle,
                     is_submodular_bruteforce, restrict, table_oracle)
from .duality import (GapReport, certify_gap, check_K_cone, check_W_membership,
                      dual_value_B, dual_value_W)
from .errors import (BudgetExceededError, DomainRangeError, MonotonicityError,
                     NonFiniteValueError, ShapeMismatchError, SubmodError,
                     SweepMonotonicityError)
from .extension import (compatible_ordering, evaluate_extension, greedy, greedy_vertex,
                        round_best, theta)
from .isotonic import pava_nonincreasing, project_feasible
from .solvers import (SeparableConvex, SeparableQuadratic, SolveResult, SolverConfig,
                      divide_and_conquer, minimize_frankwolfe, minimize_subgradient,
                      parametric_sweep, prox_quadratic, ring_family_reduce)
from .vectors import DualPoint, Ordering

__all__ = [
    "AuditBudget", "convexity_probe", "exhaustive_min", "extension_by_breakpoint_integration",
    "random_feasible_rho", "BoxSpec", "discretize", "estimate_lipschitz", "plan_accuracy",
    "ModularShift", "ProductDomain", "SetFunction", "ValueOracle", "is_submodular_bruteforce",
    "restrict", "table_oracle", "GapReport", "certify_gap", "check_K_cone",
    "check_W_membership", "dual_value_B", "dual_value_W", "BudgetExceededError",
    "DomainRangeError", "MonotonicityError", "NonFiniteValueError", "ShapeMismatchError",
    "SubmodError", "SweepMonotonicityError", "compatible_ordering", "evaluate_extension",
    "greedy", "greedy_vertex", "round_best", "theta", "pava_nonincreasing", "project_feasible",
    "SeparableConvex", "SeparableQuadratic", "SolveResult", "SolverConfig",
    "divide_and_conquer", "minimize_frankwolfe", "minimize_subgradient", "parametric_sweep",
    "prox_quadratic", "ring_family_reduce", "DualPoint", "Ordering",
]
