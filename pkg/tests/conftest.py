import numpy as np
import pytest

from torpam.covariance import NoiseSpec


@pytest.fixture
def spec_d1():
    return NoiseSpec(d=1, alpha=0.3, rho=1.0, lam=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
