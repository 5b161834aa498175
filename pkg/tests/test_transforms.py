from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqk._real import to_mpf
from eqk.dist import FiniteDist, convolve, convolve_power, mixture, survival
from eqk.errors import BadParams, ZeroMass
from eqk.orders import order_holds
from eqk.transforms import (
    discrete_equilibrium,
    gen_equilibrium,
    power_bias,
    power_to_factorial_p,
    record_survival,
    rising_factorial,
    rising_factorial_bias,
    size_bias,
    verify_transform_identities,
)

from conftest import dists

F = Fraction


def test_size_bias_example(two_point):
    assert size_bias(two_point) == FiniteDist.from_dict({1: F(1, 3), 2: F(2, 3)})


def test_power_bias_zero_mass():
    with pytest.raises(ZeroMass):
        power_bias(FiniteDist.point(0), 1)


def test_non_integer_power_bias_is_inexact(two_point):
    d = power_bias(two_point, F(1, 2))
    assert not d.exact
    assert abs(d.pmf(2) - 2**0.5 / (1 + 2**0.5)) < 1e-15


def test_rising_factorial():
    assert rising_factorial(2, 3) == 24
    assert rising_factorial(5, 0) == 1


def test_discrete_equilibrium_examples(two_point):
    # P[X^e = n] = P[X >= n] / E X
    assert discrete_equilibrium(two_point) == FiniteDist.from_dict({1: F(2, 3), 2: F(1, 3)})
    assert discrete_equilibrium(FiniteDist.point(3)) == FiniteDist.uniform([1, 2, 3])


def test_gen_equilibrium_survival_closed_form(two_point):
    g = gen_equilibrium(two_point, 1, 1)
    assert g.exact
    # X^(1) = {1: 1/3, 2: 2/3}, times an independent uniform
    assert g.survival(F(1, 2)) == F(1, 3) * F(1, 2) + F(2, 3) * F(3, 4)
    assert g.survival(2) == 0
    assert g.survival(0) == 1
    with pytest.raises(BadParams):
        gen_equilibrium(two_point, 0, 1)


def test_gen_equilibrium_real_alpha_agrees_with_integer(two_point):
    exact = gen_equilibrium(two_point, 2, 1)
    real = gen_equilibrium(two_point, 2.0000000000, 1)
    for t in (F(1, 3), F(3, 2)):
        assert abs(to_mpf(exact.survival(t)) - real.survival(float(t))) < 1e-12


def test_record_survival_example(two_point):
    assert record_survival(two_point, 2) == F(3, 4)
    assert record_survival(two_point, 1) == 1


@given(dists(min_point=1, max_point=8))
def test_equilibrium_support(d):
    e = discrete_equilibrium(d)
    assert e.min >= 1 and e.max == d.max
    assert sum(e.weights) == 1


@given(dists(min_point=0, max_point=5, max_size=4), st.integers(1, 3))
def test_equilibrium_of_sum(d, n):
    if d.mean == 0:
        return
    lhs = discrete_equilibrium(convolve_power(d, n))
    rhs = mixture([(F(1, n), convolve(convolve_power(d, i), discrete_equilibrium(d))) for i in range(n)])
    assert lhs == rhs
    assert verify_transform_identities("sum", d, n=n).holds


@given(st.lists(dists(min_point=1, max_point=6, max_size=4), min_size=1, max_size=3))
def test_equilibrium_of_mixture(parts):
    ws = [F(1, len(parts))] * len(parts)
    assert verify_transform_identities("mixture", weights=ws, parts=parts).holds


@given(dists(min_point=1, max_point=10), st.integers(1, 3))
def test_power_to_factorial_relaxed_order(d, l):
    p = power_to_factorial_p(d, l)
    assert 0 < p <= 1
    assert order_holds(power_bias(d, l + 1), rising_factorial_bias(d, l + 1), p)
    assert verify_transform_identities("power_to_factorial", d, l=l).holds


@given(dists(min_point=1), st.integers(0, 3), st.integers(0, 3))
def test_power_bias_composition(d, a, b):
    assert power_bias(power_bias(d, a), b) == power_bias(d, a + b)


@given(dists(min_point=1, max_point=6, max_size=4))
def test_scaling_identity(d):
    rep = verify_transform_identities("scaling", d, alpha=2, beta=1, gamma=F(3, 2),
                                      t_grid=[F(1, 2), 1, F(5, 2), 4])
    assert rep.holds


@given(dists(min_point=1, max_point=8))
def test_generalized_equilibrium_is_a_law(d):
    g = gen_equilibrium(d, 2, 2)
    prev = g.survival(0)
    assert prev == 1
    for k in range(1, d.max + 1):
        s = g.survival(F(2 * k - 1, 2))
        assert 0 <= s <= prev
        prev = s
    assert g.survival(d.max) == 0


@given(dists(max_point=10))
def test_record_survival_bounds(d):
    for t in d.points:
        g = survival(d, t, strict=False)
        assert g <= record_survival(d, t) <= 1
