import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from geoflow.spectral import make_grid

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid128():
    return make_grid(128)


@pytest.fixture
def grid256():
    return make_grid(256)


def random_trig_values(x, rng, degree, scale=1.0):
    """Random real trigonometric polynomial of the given degree, plus its coefficients."""
    coeffs = rng.normal(size=(degree + 1, 2)) * scale
    coeffs[0, 1] = 0.0
    vals = sum(a * np.cos(k * x) + b * np.sin(k * x) for k, (a, b) in enumerate(coeffs))
    return vals, coeffs
