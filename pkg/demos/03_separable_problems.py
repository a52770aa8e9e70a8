# The prox problem min h(rho) + ||rho||^2 / 2 and what its solution encodes.
#
# Divide-and-conquer solves it exactly with a sequence of small minimizations on
# sub-boxes. Frank-Wolfe reaches the same rho, and thresholding rho at any t gives
# the minimizer of H plus a linear tilt of size t.
import numpy as np

from prodsubmod import (ModularShift, SeparableQuadratic, SolverConfig, divide_and_conquer,
                        exhaustive_min, prox_quadratic, theta)
from prodsubmod.functions import random_submodular

oracle, domain = random_submodular(n=3, k=[5, 4, 6], seed=7)
sep = SeparableQuadratic.unit(domain)

rho_dc = divide_and_conquer(oracle, sep)
rho_fw, w, log, _ = prox_quadratic(oracle, sep, SolverConfig(max_iter=3000, tol=1e-12))
print("max |rho_dc - rho_fw| =", np.abs(rho_dc - rho_fw).max())

for t in np.unique(np.round(rho_dc, 6))[:-1] + 1e-3:
    x = theta(rho_dc, t, domain)
    tilted = ModularShift(oracle, sep.deriv(t))
    print(f"t={t:+.3f}  theta={x}  exhaustive={exhaustive_min(tilted).point}")

# Zero is the natural threshold: theta(rho, 0) minimizes H itself
print("theta at 0:", theta(rho_dc, 0.0, domain), " argmin H:", exhaustive_min(oracle).point)
