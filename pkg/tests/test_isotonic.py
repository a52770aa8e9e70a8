import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prodsubmod import ProductDomain, pava_nonincreasing, project_feasible
from prodsubmod.isotonic import project_blocks


def _partitions(m):
    """All splits of range(m) into contiguous groups."""
    for cuts in itertools.product([0, 1], repeat=m - 1):
        groups, start = [], 0
        for pos, c in enumerate(cuts, 1):
            if c:
                groups.append(range(start, pos))
                start = pos
        groups.append(range(start, m))
        yield groups


def brute_projection(values, weights=None, box=False):
    """Weighted projection by enumerating pooling patterns (and active bounds when boxed)."""
    v = np.asarray(values, dtype=float)
    w = np.ones_like(v) if weights is None else np.asarray(weights, dtype=float)
    best, best_obj = None, np.inf
    for groups in _partitions(v.size):
        means = [np.dot(w[list(g)], v[list(g)]) / w[list(g)].sum() for g in groups]
        options = [[m, 0.0, 1.0] if box else [m] for m in means]
        for choice in itertools.product(*options):
            cand = np.concatenate([np.full(len(g), c) for g, c in zip(groups, choice)])
            if np.any(np.diff(cand) > 1e-12) or (box and (cand.min() < 0 or cand.max() > 1)):
                continue
            obj = float(np.dot(w, (cand - v) ** 2))
            if obj < best_obj - 1e-15:
                best, best_obj = cand, obj
    return best


def test_pava_examples():
    np.testing.assert_allclose(pava_nonincreasing([0.2, 0.8]), [0.5, 0.5])
    np.testing.assert_array_equal(pava_nonincreasing([3.0, 2.0, 1.0]), [3.0, 2.0, 1.0])
    # pooled weighted mean of all three: (1 + 3 + 2 * 2) / 4
    out = pava_nonincreasing([1.0, 3.0, 2.0], weights=[1.0, 1.0, 2.0])
    np.testing.assert_allclose(out, [2.0, 2.0, 2.0])
    np.testing.assert_allclose(brute_projection([1, 3, 2], [1, 1, 2]), out)


def test_project_feasible_examples():
    np.testing.assert_allclose(project_feasible([np.array([1.4, -0.2])])[0], [1.0, 0.0])
    np.testing.assert_allclose(project_feasible([np.array([0.2, 0.8])])[0], [0.5, 0.5])
    d = ProductDomain([3, 2])
    np.testing.assert_allclose(project_feasible(np.array([0.2, 0.8, 7.0]), d), [0.5, 0.5, 1.0])


def test_projection_matches_bruteforce():
    rng = np.random.default_rng(0)
    for _ in range(500):
        m = int(rng.integers(1, 6))
        raw = rng.normal(0.5, 0.8, m)
        np.testing.assert_allclose(project_feasible([raw])[0], brute_projection(raw, box=True),
                                   atol=1e-12)


def test_weighted_pava_matches_bruteforce():
    rng = np.random.default_rng(1)
    for _ in range(200):
        m = int(rng.integers(1, 7))
        raw, w = rng.normal(size=m), rng.uniform(0.1, 3.0, m)
        np.testing.assert_allclose(pava_nonincreasing(raw, w), brute_projection(raw, w), atol=1e-12)


vectors = st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=12).map(np.array)


@given(vectors)
def test_pava_output_is_exactly_nonincreasing(v):
    out = pava_nonincreasing(v)
    assert np.all(np.diff(out) <= 0)
    # pooling preserves the sum
    assert out.sum() == pytest.approx(v.sum(), abs=1e-9)


@given(vectors)
def test_projection_idempotent(v):
    p = project_feasible([v])[0]
    np.testing.assert_array_equal(project_feasible([p])[0], p)


@given(vectors, st.integers(0, 2**32 - 1))
def test_projection_nonexpansive(v, seed):
    u = v + np.random.default_rng(seed).normal(size=v.size)
    pv, pu = project_feasible([v])[0], project_feasible([u])[0]
    assert np.linalg.norm(pv - pu) <= np.linalg.norm(v - u) + 1e-12


@given(vectors, st.integers(0, 2**32 - 1))
def test_projection_variational_inequality(v, seed):
    p = project_feasible([v])[0]
    rng = np.random.default_rng(seed)
    for _ in range(100):
        z = np.sort(rng.random(v.size))[::-1]
        assert np.dot(v - p, z - p) <= 1e-9


def test_project_blocks_without_box_and_weights():
    offsets = np.array([0, 2, 5])
    flat = np.array([-1.0, 2.0, 5.0, 4.0, 6.0])
    out = project_blocks(flat, offsets, weights=np.array([1.0, 3.0, 1.0, 1.0, 1.0]), box=False)
    np.testing.assert_allclose(out, [1.25, 1.25, 5.0, 5.0, 5.0])
