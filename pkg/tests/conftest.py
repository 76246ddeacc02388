import numpy as np
import pytest

from qmonodromy.params import random_params, ref_params


@pytest.fixture(scope="session")
def ref():
    return ref_params()


@pytest.fixture(scope="session")
def param_sets():
    """50 seeded random parameter sets passing every condition."""
    rng = np.random.default_rng(20240611)
    return [random_params(rng) for _ in range(50)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
