import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prodsubmod import (MonotonicityError, ProductDomain, compatible_ordering, convexity_probe,
                        evaluate_extension, exhaustive_min, extension_by_breakpoint_integration,
                        greedy, round_best, table_oracle, theta)
from prodsubmod.bruteforce import random_feasible_rho
from prodsubmod.errors import NonFiniteValueError
from prodsubmod.functions import (coupling, figure1, lovasz_extension_oracle, modular,
                                  multilinear_extension_oracle, named_set_function,
                                  random_submodular)

from conftest import small_instances


def test_theta_examples():
    d2 = ProductDomain([2, 2])
    assert theta(np.array([0.6, 0.3]), 0.5, d2).tolist() == [1, 0]
    d1 = ProductDomain([3])
    rho = np.array([0.9, 0.4])
    assert theta(rho, 0.95, d1).tolist() == [0]
    assert theta(rho, 0.6, d1).tolist() == [1]
    assert theta(rho, 0.2, d1).tolist() == [2]
    # breakpoints resolve to the lower coordinate
    assert theta(rho, 0.4, d1).tolist() == [1]


def test_compatible_ordering_examples():
    d2 = ProductDomain([2, 2])
    assert compatible_ordering(np.array([0.6, 0.3]), d2).pairs() == [(0, 1), (1, 1)]
    d1 = ProductDomain([3])
    assert compatible_ordering(np.array([0.5, 0.5]), d1).pairs() == [(0, 1), (0, 2)]


def test_cross_block_ties_depend_on_seed_not_value(step_oracle):
    rho = np.array([0.5, 0.5])
    seen, values = set(), set()
    for seed in range(20):
        out = greedy(step_oracle, rho, seed=seed)
        seen.add(tuple(out.ordering.pairs()))
        values.add(out.value)
    assert seen == {((0, 1), (1, 1)), ((1, 1), (0, 1))}
    assert len(values) == 1


def test_greedy_step_example(step_oracle):
    out = greedy(step_oracle, np.array([0.6, 0.3]))
    assert out.value == pytest.approx(0.6, abs=1e-15)
    np.testing.assert_array_equal(out.w.flat, [1.0, 0.0])
    assert out.best_point.tolist() == [0, 0] and out.best_value == 0.0
    assert extension_by_breakpoint_integration(step_oracle, np.array([0.6, 0.3])) == pytest.approx(0.6)


def test_greedy_modular_example():
    oracle, _ = modular([1.0, 1.0], 3)
    out = greedy(oracle, np.array([0.9, 0.4, 0.7, 0.1]))
    assert out.value == pytest.approx(2.1, abs=1e-14)
    np.testing.assert_array_equal(out.w.flat, np.ones(4))


def test_endpoints():
    oracle, d = random_submodular(3, [3, 4, 2], 5)
    assert evaluate_extension(oracle, np.ones(d.r)) == pytest.approx(oracle(d.top), abs=1e-14)
    assert evaluate_extension(oracle, np.zeros(d.r)) == pytest.approx(oracle(d.zero), abs=1e-14)


def test_chain_structure_and_eval_count():
    oracle, d = random_submodular(3, [4, 3, 5], 2)
    rho = random_feasible_rho(d, np.random.default_rng(0))
    oracle.reset_counter()
    out = greedy(oracle, rho)
    assert oracle.evals == d.r + 1
    assert out.chain[0].tolist() == [0, 0, 0] and out.chain[-1].tolist() == d.top.tolist()
    assert np.all(np.abs(np.diff(out.chain, axis=0)).sum(axis=1) == 1)
    assert out.w.flat.sum() == pytest.approx(oracle(d.top) - oracle(d.zero), abs=1e-12)


def test_nonmonotone_rho_rejected(step_oracle):
    d = ProductDomain([3])
    o = table_oracle(np.array([0.0, 1.0, 3.0]))
    with pytest.raises(MonotonicityError):
        greedy(o, np.array([0.2, 0.5]))
    # within the 1e-12 tolerance is accepted
    greedy(o, np.array([0.2, 0.2 + 5e-13]))


def test_nonfinite_oracle_values_raise():
    o = table_oracle(np.array([0.0, np.inf]), lipschitz=[1.0])
    with pytest.raises(NonFiniteValueError):
        greedy(o, np.array([0.5]))


def test_round_best_examples(step_oracle):
    pt, val = round_best(step_oracle, np.array([0.6, 0.3]))
    assert pt.tolist() == [0, 0] and val == 0.0
    oracle, d = figure1(21)
    ref = exhaustive_min(oracle)
    rho = np.concatenate([(np.arange(1, 21) <= xi) * 0.9 + 0.05 for xi in ref.point])
    pt, val = round_best(oracle, rho)
    assert pt.tolist() == ref.point.tolist()
    pos, _ = modular([0.5, 2.0], 4)
    rng = np.random.default_rng(0)
    for _ in range(20):
        pt, _ = round_best(pos, random_feasible_rho(pos.domain, rng))
        assert pt.tolist() == [0, 0]


def test_greedy_matches_breakpoint_integration():
    rng = np.random.default_rng(11)
    for oracle, d in small_instances(10, seed0=40):
        for _ in range(50):
            rho = random_feasible_rho(d, rng)
            assert abs(greedy(oracle, rho).value
                       - extension_by_breakpoint_integration(oracle, rho)) <= 1e-12


def test_breakpoint_integration_eval_count():
    oracle, d = random_submodular(2, [4, 4], 1)
    rho = np.array([0.9, 0.5, 0.5, 0.5, 0.2, 0.1])
    oracle.reset_counter()
    extension_by_breakpoint_integration(oracle, rho)
    assert oracle.evals == len(np.unique(rho)) + 1 + 2


@st.composite
def instance_and_rho(draw):
    seed = draw(st.integers(0, 10_000))
    n = draw(st.integers(1, 3))
    k = draw(st.lists(st.integers(2, 5), min_size=n, max_size=n))
    oracle, d = random_submodular(n, k, seed)
    raw = draw(st.lists(st.floats(0, 1), min_size=d.r, max_size=d.r))
    rho = np.concatenate([np.sort(b)[::-1] for b in d.split(np.array(raw))])
    return oracle, d, rho


@given(instance_and_rho(), st.integers(0, 100))
def test_order_invariance_and_tightness(inst, seed):
    oracle, d, rho = inst
    a = greedy(oracle, rho, seed=None)
    b = greedy(oracle, rho, seed=seed)
    assert a.value == pytest.approx(b.value, abs=1e-12)
    for out in (a, b):
        assert out.value - out.chain_values[0] == pytest.approx(np.dot(out.w.flat, rho), abs=1e-12)


@given(instance_and_rho(), st.floats(0.05, 3.0), st.floats(-2.0, 2.0))
def test_homogeneity_and_translation(inst, lam, c):
    oracle, d, rho = inst
    h0, htop = oracle(d.zero), oracle(d.top)
    base = evaluate_extension(oracle, rho) - h0
    assert evaluate_extension(oracle, lam * rho) - h0 == pytest.approx(lam * base, abs=1e-10)
    shifted = evaluate_extension(oracle, rho + c)
    assert shifted == pytest.approx(base + h0 + c * (htop - h0), abs=1e-10)


@pytest.mark.parametrize("make", [
    lambda: figure1(11),
    lambda: coupling(3, 4, phi="abs", unary_scale=1.0, seed=0),
    lambda: random_submodular(3, [3, 4, 3], 9),
    lambda: lovasz_extension_oracle(named_set_function("sqrt", 2), 5),
    lambda: multilinear_extension_oracle(named_set_function("cut", 2, seed=3), 5),
])
def test_midpoint_convexity_for_submodular(make):
    oracle, d = make()
    assert convexity_probe(lambda r: evaluate_extension(oracle, r), d, segments=200).passed


def test_convexity_fails_for_product(product_oracle):
    res = convexity_probe(lambda r: evaluate_extension(product_oracle, r), product_oracle.domain)
    assert not res.passed
    a, b = res.witness
    f = lambda r: evaluate_extension(product_oracle, r)  # noqa: E731
    assert f(0.5 * (a + b)) > 0.5 * (f(a) + f(b)) + 1e-9
