import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from substatic import models as M

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def schw():
    return M.schwarzschild(0.5)


@pytest.fixture(scope="session")
def rn():
    return M.reissner_nordstrom(1.0, 0.5)


@pytest.fixture(scope="session")
def flat():
    return M.euclidean()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
