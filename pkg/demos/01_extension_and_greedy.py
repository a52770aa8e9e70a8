# The convex extension of a function on a grid, evaluated two ways.
#
# A point of {0..k-1}^n is encoded by n nonincreasing vectors rho_i of length
# k-1 with entries in [0, 1]. The greedy algorithm sorts all entries, walks up
# a chain of grid points and returns both the extension value and a vertex w of
# the base polytope. Integrating H over thresholds gives the same number.
import numpy as np

from prodsubmod import (convexity_probe, evaluate_extension,
                        extension_by_breakpoint_integration, greedy, table_oracle)
from prodsubmod.bruteforce import random_feasible_rho
from prodsubmod.functions import figure1

oracle, domain = figure1(k=21)
print(oracle, "r =", domain.r)

rng = np.random.default_rng(1)
rho = random_feasible_rho(domain, rng)
out = greedy(oracle, rho)
print("greedy value      ", out.value)
print("threshold integral", extension_by_breakpoint_integration(oracle, rho))
print("evaluations per greedy call:", domain.r + 1)

# <w, rho> + H(0) is the extension value: w is a maximizer of the support function
print("H(0) + <w, rho>   ", out.chain_values[0] + np.dot(out.w.flat, rho))

# An indicator-like rho reproduces H at the encoded point
x = np.array([15, 4])
rho_x = np.concatenate([(np.arange(1, k) <= xi).astype(float) for k, xi in zip(domain.k, x)])
print("h(rho_x) =", evaluate_extension(oracle, rho_x), " H(x) =", oracle(x))

# Convexity along random segments holds for submodular H ...
print("figure1 probe:", convexity_probe(lambda r: evaluate_extension(oracle, r), domain).passed)

# ... and fails for x1 * x2 on {0,1}^2, which is supermodular
prod = table_oracle(np.array([[0.0, 0.0], [0.0, 1.0]]))
res = convexity_probe(lambda r: evaluate_extension(prod, r), prod.domain)
print("x1*x2 probe:", res.passed, "witness:", res.witness)
