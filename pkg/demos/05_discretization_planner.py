# How fine a grid, and how many iterations, for a target accuracy on a box.
#
# For an l-infinity G-Lipschitz function on [0, B]^n, k = 2GB/eps grid values
# and t = (2GBn/eps)^2 subgradient steps suffice for accuracy eps.
from prodsubmod import (BoxSpec, SolverConfig, discretize, estimate_lipschitz,
                        exhaustive_min, minimize_subgradient, plan_accuracy)
from prodsubmod.functions import figure1_value

lo, hi = [-1.0, -1.0], [1.0, 1.0]
G = estimate_lipschitz(figure1_value, lo, hi)
spec = BoxSpec(lo, hi, G)
print(f"measured G = {G:.4f}, B = {spec.B}")

for eps in (0.5, 0.2):
    plan = plan_accuracy(spec.G, spec.B, spec.n, eps)
    oracle, _ = discretize(figure1_value, spec, plan.k)
    # t is a worst-case iteration count; the certificate usually stops the run much earlier
    res = minimize_subgradient(oracle, SolverConfig(max_iter=plan.t, tol=1e-9))
    fine, _ = discretize(figure1_value, spec, 10 * (plan.k - 1) + 1)
    err = res.value - exhaustive_min(fine).value
    print(f"eps={eps}: k={plan.k} t={plan.t} projected evals={plan.evals:,} iterations used={len(res.log)} error={err:.4f}")
