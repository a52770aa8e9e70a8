"""End-to-end acceptance checks; each test prints one PASS/FAIL line."""
import time

import numpy as np
import pytest

from prodsubmod import (ProductDomain, SolverConfig, check_W_membership, evaluate_extension, exhaustive_min,
                        extension_by_breakpoint_integration, greedy, is_submodular_bruteforce)
from prodsubmod.bruteforce import convexity_probe, random_feasible_rho
from prodsubmod.cli import DENOISE_DEFAULTS, build_instance, run_solver
from prodsubmod.continuous import BoxSpec, discretize, estimate_lipschitz, plan_accuracy
from prodsubmod.domain import ModularShift, ValueOracle
from prodsubmod.extension import theta
from prodsubmod.functions import (coupling, figure1, figure1_value, lovasz_extension_oracle,
                                  modular, multilinear_extension_oracle, named_set_function,
                                  random_submodular)
from prodsubmod.solvers import (SeparableQuadratic, divide_and_conquer, minimize_frankwolfe,
                                minimize_subgradient, parametric_sweep, prox_objective,
                                prox_quadratic, ring_family_reduce)
from prodsubmod.solvers.ring import ring_closure



@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail
    return emit


def random_instances(count, seed0, n_range=(2, 4), k_max=6, size_max=None):
    rng = np.random.default_rng(seed0)
    out = []
    for s in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        cap = k_max if size_max is None else max(2, min(k_max, int(size_max ** (1.0 / n))))
        ks = [int(v) for v in rng.integers(2, cap + 1, size=n)]
        out.append(random_submodular(n, ks, seed0 + s))
    return out


def desk_suite():
    return [figure1(51)] + random_instances(10, 400, n_range=(2, 4), k_max=30, size_max=10**4)


def test_criterion_1_greedy_matches_integration(verdict):
    start = time.perf_counter()
    worst = 0.0
    rng = np.random.default_rng(1)
    for oracle, d in random_instances(20, 100, n_range=(1, 4), k_max=6):
        for _ in range(50):
            rho = random_feasible_rho(d, rng)
            worst = max(worst, abs(greedy(oracle, rho).value - extension_by_breakpoint_integration(oracle, rho)))
    elapsed = time.perf_counter() - start
    verdict(1, worst <= 1e-12 and elapsed <= 10, f"max diff {worst:.2e} over 1000 rho, {elapsed:.1f} s")


def test_criterion_2_greedy_outputs_are_certified(verdict):
    rng = np.random.default_rng(2)
    worst_viol, worst_top, worst_tight = -np.inf, 0.0, 0.0
    for oracle, d in random_instances(5, 200, k_max=5):
        h0 = oracle(d.zero)
        for _ in range(200):
            rho = random_feasible_rho(d, rng)
            out = greedy(oracle, rho)
            mem = check_W_membership(oracle, out.w.flat, d)
            worst_viol = max(worst_viol, mem.worst_violation)
            worst_top = max(worst_top, abs(mem.top_residual))
            worst_tight = max(worst_tight, abs(out.w.flat @ d.flatten(rho) - (out.value - h0)))
    ok = worst_viol <= 1e-9 and worst_top <= 1e-9 and worst_tight <= 1e-12
    verdict(2, ok, f"violation {worst_viol:.1e}, top residual {worst_top:.1e}, tightness {worst_tight:.1e}")


def test_criterion_3_convexity_iff_submodularity(verdict):
    cases = [figure1(21), modular([1.0, -0.5, 0.2], 4), coupling(3, 5, unary_scale=1.0, seed=3)]
    cases += random_instances(3, 300, k_max=5)
    for name in ("cardinality", "min1", "sqrt", "cut"):
        g = named_set_function(name, 3, seed=1)
        cases += [lovasz_extension_oracle(g, 4), multilinear_extension_oracle(g, 4)]
    failures = []
    for oracle, d in cases:
        res = convexity_probe(lambda r: evaluate_extension(oracle, r), d, segments=500, seed=0)
        if not res.passed:
            failures.append(oracle.name)
    prod = ValueOracle(lambda p: (p[:, 0] * p[:, 1]).astype(float), ProductDomain([2, 2]), name="x1*x2")
    bad = convexity_probe(lambda r: evaluate_extension(prod, r), prod.domain, segments=500, seed=0)
    ok = not failures and not bad.passed and bad.witness is not None
    verdict(3, ok, f"{len(cases)} submodular oracles pass, failures {failures}; x1*x2 witness found: {not bad.passed}")


def test_criterion_4_exact_minimization(verdict):
    start = time.perf_counter()
    problems = []
    for oracle, d in desk_suite():
        truth = exhaustive_min(oracle).value
        for solve in (minimize_subgradient, minimize_frankwolfe):
            res = solve(oracle, SolverConfig(max_iter=5000, tol=1e-6))
            if abs(res.value - truth) > 1e-9 or res.gap > 1e-6 or not res.w.certified:
                problems.append((oracle.name, solve.__name__, res.value - truth, res.gap))
    elapsed = time.perf_counter() - start
    verdict(4, not problems and elapsed <= 60, f"22 runs, problems {problems}, {elapsed:.1f} s")


def test_criterion_5_rate_envelopes(verdict):
    worst_sg, worst_fw = 0.0, 0.0
    for oracle, d in [figure1(21)] + random_instances(6, 500, k_max=6):
        k = np.asarray(d.k, dtype=float)
        B = oracle.lipschitz
        truth = exhaustive_min(oracle).value
        sg_const = np.sqrt(k.sum() * np.sum(k * B ** 2))
        for rule in ("polyak", "decaying"):
            res = minimize_subgradient(oracle, SolverConfig(max_iter=400, tol=0.0, step_rule=rule,
                                                            dual_refine_every=0))
            t = np.arange(1, len(res.log) + 1)
            excess = np.asarray(res.log.primal) - truth
            worst_sg = max(worst_sg, float(np.max(excess / (sg_const / np.sqrt(t)))))
        sep = SeparableQuadratic.unit(d)
        opt = prox_objective(oracle, sep, divide_and_conquer(oracle, sep, tol=1e-12))
        _, _, log, _ = prox_quadratic(oracle, sep, SolverConfig(max_iter=400, tol=0.0, fw_variant="classic"))
        t = np.arange(1, len(log) + 1)
        worst_fw = max(worst_fw, float(np.max((opt - np.asarray(log.dual)) / (2 * np.sum(k * B ** 2) / t))))
    ok = worst_sg <= 1.05 and worst_fw <= 1.05
    verdict(5, ok, f"largest ratio to envelope: subgradient {worst_sg:.3f}, Frank-Wolfe {worst_fw:.3f}")


def test_criterion_6_separable_theorems(verdict):
    worst_agree, worst_level, worst_recon, monotone = 0.0, 0.0, 0.0, True
    for oracle, d in random_instances(10, 600, n_range=(2, 3), k_max=5):
        sep = SeparableQuadratic.unit(d)
        exact = divide_and_conquer(oracle, sep, tol=1e-12)
        approx, _, _, _ = prox_quadratic(oracle, sep, SolverConfig(max_iter=20000, tol=1e-14))
        worst_agree = max(worst_agree, float(np.max(np.abs(exact - approx))))
        vals = np.unique(exact)
        for t in np.concatenate([(vals[1:] + vals[:-1]) / 2, [vals[0] - 1, vals[-1] + 1]]):
            shifted = ModularShift(oracle, sep.deriv(t))
            worst_level = max(worst_level, shifted(theta(exact, t, d)) - exhaustive_min(shifted).value)
        grid = np.linspace(vals[0] - 0.25, vals[-1] + 0.25, 201)
        sw = parametric_sweep(oracle, sep, grid)
        monotone &= bool(np.all(np.diff(sw.points, axis=0) <= 0))
        worst_recon = max(worst_recon, float(np.max(np.abs(sw.rho - exact))) / (grid[1] - grid[0]))
    ok = worst_agree <= 1e-6 and worst_level <= 1e-9 and monotone and worst_recon <= 1.0 + 1e-9
    verdict(6, ok, f"D&C vs FW {worst_agree:.1e}, level-set excess {worst_level:.1e}, "
                   f"sweep monotone {monotone}, reconstruction {worst_recon:.2f} grid steps")


def test_criterion_7_rounding_bound(verdict):
    worst = 0.0
    for oracle, d in desk_suite():
        sep = SeparableQuadratic.unit(d)
        opt = prox_objective(oracle, sep, divide_and_conquer(oracle, sep, tol=1e-12))
        truth = exhaustive_min(oracle).value
        for iters in (1, 2, 5, 20, 100):
            rho, _, _, _ = prox_quadratic(oracle, sep, SolverConfig(max_iter=iters, tol=0.0))
            eps = max(prox_objective(oracle, sep, rho) - opt, 0.0)
            sub = greedy(oracle, rho).best_value - truth
            bound = 2 * np.sqrt(eps * np.sum(d.k))
            worst = max(worst, sub / bound if bound > 0 else (0.0 if sub <= 1e-12 else np.inf))
    verdict(7, worst <= 1.0, f"largest ratio of rounding suboptimality to bound {worst:.3f}")


def test_criterion_8_ring_reduction(verdict):
    bad = []
    for oracle, d in random_instances(10, 700, n_range=(1, 3), k_max=4):
        g, decode = ring_family_reduce(oracle, oracle.lipschitz + 0.5)
        zs = np.array(np.meshgrid(*[[0, 1]] * g.n, indexing="ij")).reshape(g.n, -1).T
        vals = g(zs)
        z = zs[int(np.argmin(vals))]
        truth = exhaustive_min(oracle)
        set_oracle = ValueOracle(lambda p: g(p), ProductDomain([2] * g.n), name="ring")
        ok_sub = is_submodular_bruteforce(set_oracle)[0]
        ok_closed = np.array_equal(ring_closure(z, d.offsets)[0], z)
        if not (ok_sub and ok_closed and np.array_equal(decode(z), truth.point)):
            bad.append(oracle.name)
    verdict(8, not bad, f"10 instances, mismatches {bad}")


def test_criterion_9_discretization_planner(verdict):
    G = estimate_lipschitz(figure1_value, [-1, -1], [1, 1])
    spec = BoxSpec.cube(2, -1.0, 1.0, G)
    errors = {}
    for eps in (0.5, 0.2):
        plan = plan_accuracy(G, spec.B, 2, eps)
        oracle, d = discretize(figure1_value, spec, plan.k)
        res = minimize_subgradient(oracle, SolverConfig(max_iter=plan.t, tol=0.0))
        fine, _ = discretize(figure1_value, spec, 10 * (plan.k - 1) + 1)
        errors[eps] = float(figure1_value(d.coordinates(res.point[None, :]))[0] - exhaustive_min(fine).value)
    ok = all(0.0 <= err <= eps for eps, err in errors.items())
    verdict(9, ok, f"G={G:.4f}; error at eps 0.5: {errors[0.5]:.2e}, at eps 0.2: {errors[0.2]:.2e}")


@pytest.mark.slow
def test_criterion_10_denoising_experiment(verdict):
    start = time.perf_counter()
    cfg = dict(DENOISE_DEFAULTS, example="denoise", seed=0, budget=10**9, step="polyak",
               precondition=False, timing=False, phi="square", solver=["subgrad", "fw", "pfw"])
    assert cfg["n"] == 50 and cfg["k"] == 50 and cfg["alpha"] == 0.125 and cfg["iters"] == 1000
    oracle, _, _ = build_instance(cfg)
    final, nonincreasing = {}, True
    for name in cfg["solver"]:
        res = run_solver(name, oracle, cfg)
        gaps = np.asarray(res.log.gap)
        nonincreasing &= bool(np.all(np.diff(gaps) <= 1e-12) and np.all(gaps >= -1e-9))
        nonincreasing &= res.w.certified and len(gaps) == 1000
        final[name] = gaps[-1]
    elapsed = time.perf_counter() - start
    ok = nonincreasing and final["pfw"] < final["subgrad"] and elapsed <= 120
    verdict(10, ok, "gaps at 1000: " + ", ".join(f"{k} {v:.2e}" for k, v in final.items())
            + f"; {elapsed:.0f} s")
