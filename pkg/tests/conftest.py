import numpy as np
import pytest

from tvfi import DgpSpec, simulate_tvfi


@pytest.fixture(scope="session")
def constant_series():
    """One moderately long constant-memory series shared across test modules."""
    return simulate_tvfi(DgpSpec(kind="constant", n=400, sigma=1.5, seed=11, d=0.3))


@pytest.fixture(scope="session")
def linear_series():
    return simulate_tvfi(DgpSpec(kind="linear_trend", n=300, sigma=2.0, seed=7))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
