import numpy as np
import pytest

from prodsubmod import SolverConfig, certify_gap, evaluate_extension, exhaustive_min
from prodsubmod.functions import figure1, modular, random_submodular
from prodsubmod.solvers import (IterateLog, SeparableQuadratic, minimize_frankwolfe,
                                minimize_subgradient, prox_objective, prox_quadratic)
from prodsubmod.solvers.subgradient import _on_schedule

from conftest import small_instances


@pytest.mark.parametrize("bad", [dict(max_iter=0), dict(step_rule="newton"), dict(fw_variant="x"),
                                 dict(step_rule="fixed"), dict(tol=-1.0), dict(eval_budget=0)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        SolverConfig(**bad)


def test_log_records_gap_and_csv():
    log = IterateLog()
    log.append(0, 1.0, 0.25, 3, 12.3456)
    assert log.gap == [0.75] and log.last["evals"] == 3
    assert log.to_csv(timing=False).splitlines() == ["iter,primal,dual,gap,evals,ms",
                                                      "0,1.0,0.25,0.75,3,0.000"]
    assert log.to_csv().splitlines()[1].endswith("12.346")


def test_refine_schedule():
    assert [i for i in range(1, 220) if _on_schedule(i, 25)] == [25, 50, 100, 200]


@pytest.mark.parametrize("solve", [minimize_subgradient, minimize_frankwolfe])
def test_modular_examples(solve):
    pos, _ = modular([1.0, 2.0], 3)
    res = solve(pos)
    assert res.point.tolist() == [0, 0] and res.value == 0.0 and res.gap <= 1e-8
    neg, _ = modular([-1.0, 0.5], 4)
    res = solve(neg)
    assert res.point.tolist() == [3, 0] and res.value == pytest.approx(-3.0)


def test_step_example_converges_quickly(step_oracle):
    res = minimize_subgradient(step_oracle, SolverConfig(max_iter=50))
    assert res.status == "converged" and res.value == 0.0


@pytest.mark.parametrize("solve", [minimize_subgradient, minimize_frankwolfe])
def test_log_invariants_on_random(solve):
    for oracle, d in small_instances(4, seed0=30):
        res = solve(oracle, SolverConfig(max_iter=300))
        arr = res.log.as_arrays()
        assert np.all(np.diff(arr["primal"]) <= 0) and np.all(np.diff(arr["dual"]) >= 0)
        assert np.all(arr["gap"] >= -1e-9)
        assert np.all(np.diff(arr["evals"]) > 0)
        truth = exhaustive_min(oracle).value
        assert arr["dual"][-1] <= truth + 1e-9 <= arr["primal"][-1] + 2e-9
        assert res.value == pytest.approx(oracle(res.point))
        rep = certify_gap(oracle, res.rho, res.w)
        assert rep.certified and rep.dual_value <= truth + 1e-9
        assert rep.dual_value == pytest.approx(arr["dual"][-1], abs=1e-9)


def test_figure1_subgradient_gap():
    oracle, _ = figure1(51)
    res = minimize_subgradient(oracle, SolverConfig(max_iter=2000, tol=1e-2))
    assert res.gap <= 1e-2
    assert res.value == pytest.approx(-1.9997099760225596, abs=1e-2)


def test_pairwise_needs_fewer_iterations_than_classic():
    oracle, _ = figure1(21)
    pair = minimize_frankwolfe(oracle, SolverConfig(max_iter=3000, tol=1e-6))
    classic = minimize_frankwolfe(oracle, SolverConfig(max_iter=3000, tol=1e-6, fw_variant="classic"))
    assert pair.status == "converged"
    assert len(pair.log) < len(classic.log)


def test_preconditioning_reaches_same_minimum():
    oracle, _ = random_submodular(3, [5, 2, 4], 9)
    truth = exhaustive_min(oracle).value
    res = minimize_subgradient(oracle, SolverConfig(max_iter=3000, precondition=True))
    assert res.value == pytest.approx(truth, abs=1e-9)


@pytest.mark.parametrize("solve", [minimize_subgradient, minimize_frankwolfe])
def test_eval_budget_returns_best_so_far(solve):
    oracle, d = figure1(31)
    res = solve(oracle, SolverConfig(max_iter=10**5, tol=0.0, eval_budget=40 * (d.r + 1)))
    assert res.budget_exhausted
    assert res.log.evals[-1] <= 40 * (d.r + 1)
    assert np.isfinite(res.value)


def test_prox_binary_example():
    # H(x) = x on {0,1}: rho* = -1 and the prox objective is -1/2
    oracle, d = modular([1.0], 2)
    sep = SeparableQuadratic.unit(d)
    rho, w, log, _ = prox_quadratic(oracle, sep, SolverConfig(max_iter=50, tol=1e-12))
    assert rho == pytest.approx([-1.0])
    assert prox_objective(oracle, sep, rho) == pytest.approx(-0.5)
    assert log.gap[-1] <= 1e-12


@pytest.mark.parametrize("variant", ["classic", "linesearch", "pairwise"])
def test_prox_dual_is_a_lower_bound(variant):
    oracle, d = random_submodular(2, [4, 3], 2)
    sep = SeparableQuadratic.unit(d)
    rho, w, log, _ = prox_quadratic(oracle, sep, SolverConfig(max_iter=400, fw_variant=variant))
    assert prox_objective(oracle, sep, rho) == pytest.approx(log.primal[-1])
    # the dual value at w bounds the prox optimum from below
    assert log.dual[-1] <= log.primal[-1] + 1e-12
    assert np.all(np.diff(log.primal) <= 0)


def test_subgradient_deterministic():
    oracle, _ = random_submodular(2, [5, 5], 4)
    a = minimize_subgradient(oracle, SolverConfig(max_iter=100, step_rule="decaying"))
    b = minimize_subgradient(oracle, SolverConfig(max_iter=100, step_rule="decaying"))
    assert a.log.primal == b.log.primal and a.log.dual == b.log.dual
