from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from eqk.dist import FiniteDist

settings.register_profile(
    "eqk",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("eqk")


@st.composite
def dists(draw, min_point=0, max_point=10, max_size=6, max_weight=12):
    """Exact laws with small integer weights on a random subset of the support."""
    pts = draw(st.lists(st.integers(min_point, max_point), min_size=1, max_size=max_size, unique=True))
    ws = draw(st.lists(st.integers(1, max_weight), min_size=len(pts), max_size=len(pts)))
    return FiniteDist.from_pairs(zip(pts, ws), normalize=True)


probs = st.fractions(min_value=0, max_value=1, max_denominator=20)


@pytest.fixture
def two_point():
    return FiniteDist.from_dict({1: Fraction(1, 2), 2: Fraction(1, 2)})
