import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from birkspec.shift_core import PccFunction

settings.register_profile(
    "repo", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@st.composite
def pcc_functions(draw, min_depth=1, max_depth=3, low=-2.0, high=2.0):
    k = draw(st.integers(min_depth, max_depth))
    vals = draw(
        st.lists(
            st.floats(low, high, allow_nan=False, allow_infinity=False),
            min_size=1 << k,
            max_size=1 << k,
        )
    )
    return PccFunction(k, tuple(vals))


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240611))


def random_function(rng, max_depth=3, min_depth=1, decimals=None):
    k = int(rng.integers(min_depth, max_depth + 1))
    vals = rng.uniform(-1, 1, 1 << k)
    if decimals is not None:
        vals = np.round(vals, decimals)
    return PccFunction(k, tuple(vals))
