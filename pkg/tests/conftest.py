import numpy as np
import pytest

from anisoperim import Norm, PolarNorm
from anisoperim.presets import make_field, make_norm

COARSE_H = 1.0 / 48.0


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def euclid():
    norm = Norm.euclidean()
    return norm, PolarNorm(norm)


@pytest.fixture(scope="session")
def ellipse21():
    norm = Norm.ellipse(2.0, 1.0)
    return norm, PolarNorm(norm)


@pytest.fixture(scope="session")
def power3():
    norm = Norm.pnorm(3.0)
    return norm, PolarNorm(norm)


@pytest.fixture(scope="session", params=["euclidean", "ellipse", "power3"])
def norm_pair(request):
    """All three built-in gauges with analytic polars, by preset name."""
    return request.param, make_norm(request.param)


@pytest.fixture(scope="session")
def radial_field_euclid(euclid):
    _, polar = euclid
    return make_field("radial-quadratic", "euclidean", polar, h=COARSE_H)


@pytest.fixture(scope="session")
def aniso_field_ellipse(ellipse21):
    _, polar = ellipse21
    return make_field("aniso-quadratic", "ellipse", polar, h=COARSE_H)
