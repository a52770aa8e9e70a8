import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from prodsubmod import ProductDomain, table_oracle
from prodsubmod.functions import random_submodular

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def step_oracle():
    """{0,1}^2 with H(0,0)=0 and 1 elsewhere."""
    return table_oracle(np.array([[0.0, 1.0], [1.0, 1.0]]), name="step")


@pytest.fixture
def product_oracle():
    """x1 * x2 on {0,1}^2: supermodular."""
    return table_oracle(np.array([[0.0, 0.0], [0.0, 1.0]]), name="x1x2")


def small_instances(count, seed0=0, n_max=3, k_max=5):
    out = []
    for s in range(count):
        rng = np.random.default_rng(seed0 + s)
        n = int(rng.integers(1, n_max + 1))
        k = [int(v) for v in rng.integers(2, k_max + 1, n)]
        out.append(random_submodular(n, k, seed0 + s))
    return out


def flat_blocks(*blocks):
    return np.concatenate([np.asarray(b, dtype=float) for b in blocks])


def domain_of(*k):
    return ProductDomain(list(k))
