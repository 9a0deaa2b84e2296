import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

settings.register_profile(
    "permpoly",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("permpoly")

finite = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)


@st.composite
def complex_matrices(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    re = draw(arrays(np.float64, (n, n), elements=finite))
    im = draw(arrays(np.float64, (n, n), elements=finite))
    return re + 1j * im


@st.composite
def complex_scalars(draw, bound=2.0):
    f = st.floats(-bound, bound, allow_nan=False, allow_infinity=False)
    return complex(draw(f), draw(f))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def cmat(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
