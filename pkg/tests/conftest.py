import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "bhk",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("bhk")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def random_rotation(rng, dim):
    m = rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(m)
    return q * np.sign(np.diag(r))
