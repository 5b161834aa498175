import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqk.dist import FiniteDist
from eqk.errors import BadSchedule, BudgetExceeded
from eqk.orders import dominates
from eqk.randdist import random_schedule
from eqk.transforms import rising_factorial_moment
from eqk.urn import (
    UrnSpec,
    moment_tail_bound,
    polya_pmf,
    rf_moment,
    rf_moment_closed_form,
    second_moment,
    urn_pmf,
    urn_rows,
    verify_urn_lemmas,
)

F = Fraction


def _oracle(b, w, n, l):
    """Direct path enumeration of the urn: a dict of white counts."""
    states = {w: F(1)}
    for m in range(n):
        total = b + w + m + m // l
        nxt: dict = {}
        for k, p in states.items():
            nxt[k + 1] = nxt.get(k + 1, 0) + p * F(k, total)
            nxt[k] = nxt.get(k, 0) + p * F(total - k, total)
        states = nxt
    return FiniteDist.from_dict(states)


def test_small_example():
    assert urn_pmf(UrnSpec(1, 1, 2, 1)) == FiniteDist.from_dict({1: F(3, 8), 2: F(3, 8), 3: F(1, 4)})


def test_polya_is_uniform():
    assert polya_pmf(1, 2) == FiniteDist.uniform([1, 2, 3])
    assert polya_pmf(1, 5) == FiniteDist.uniform(range(1, 7))


def test_closed_form_small_value():
    assert rf_moment_closed_form(0, 1) == 6
    assert rf_moment_closed_form(1, 1) == rising_factorial_moment(urn_pmf(UrnSpec(1, 2, 1, 1)), 2)


def test_bad_specs():
    with pytest.raises(BadSchedule):
        UrnSpec(0, 0, 3)
    with pytest.raises(BadSchedule):
        UrnSpec(1, 1, 3, schedule=(2, 3))
    with pytest.raises(BadSchedule):
        UrnSpec(1, 1, 2, schedule=(3, 4))
    with pytest.raises(BadSchedule):
        UrnSpec(1, 1, 2, schedule=(2, 2))
    with pytest.raises(BudgetExceeded):
        urn_pmf(UrnSpec(1, 1, 5000))


@given(st.integers(0, 3), st.integers(1, 4), st.integers(0, 12), st.integers(1, 3))
def test_recurrence_matches_enumeration(b, w, n, l):
    assert urn_pmf(UrnSpec(b, w, n, l)) == _oracle(b, w, n, l)


@given(st.integers(0, 3), st.integers(1, 4), st.integers(1, 3))
def test_rows_are_probability_laws(b, w, l):
    for _, row, den in urn_rows(UrnSpec(b, w, 40, l)):
        assert sum(row) == den and min(row) >= 0


@given(st.integers(0, 3), st.integers(1, 4), st.integers(0, 30), st.integers(1, 3), st.integers(1, 4))
def test_rf_moment_product_form(b, w, n, l, r):
    spec = UrnSpec(b, w, n, l)
    assert rf_moment(spec, r) == rising_factorial_moment(urn_pmf(spec), r)


@given(st.integers(0, 40), st.integers(1, 4))
def test_closed_form_moments(n, m):
    assert rf_moment_closed_form(n, m) == rf_moment(UrnSpec(1, 2, n, 1), 2 * m)


@given(st.integers(0, 30), st.integers(1, 3))
def test_shift_identity(n, w):
    # starting with no black balls, the first draw is white for sure
    a = urn_pmf(UrnSpec(0, w, n + 1, 1))
    b = urn_pmf(UrnSpec(1, w + 1, n, 1))
    assert a == b


@given(st.integers(0, 30))
def test_bridge_identity(n):
    assert urn_pmf(UrnSpec(0, 1, n + 1, 1)) == urn_pmf(UrnSpec(1, 2, n, 1))


@given(st.integers(1, 20), st.integers(1, 3), st.integers(1, 3))
def test_extra_black_balls_stochastically_lower(n, w, l):
    # adding black balls can only slow white growth: the urn sits below the regular Polya urn
    assert dominates(urn_pmf(UrnSpec(1, w, n, l)), polya_pmf(w, n)).holds


def test_random_schedules_technical_variant():
    rng = random.Random(5)
    specs = []
    for _ in range(25):
        b, w = rng.randint(0, 3), rng.randint(1, 4)
        specs.append(UrnSpec(b, w, 30, schedule=random_schedule(rng, b + w, 30)))
    assert verify_urn_lemmas("tech", specs).holds


@pytest.mark.parametrize("kind", ["lc", "tech", "variant", "unfac"])
def test_lemmas_small_grid(kind):
    specs = [UrnSpec(b, w, 12, l) for b in range(4) for w in range(1, 4) for l in range(1, 3)]
    rep = verify_urn_lemmas(kind, specs)
    assert rep.holds
    assert rep.exact


def test_generalized_equilibrium_domination():
    specs = [UrnSpec(b, w, n, l) for b in (0, 1) for w in range(1, 4) for l in range(1, 3) for n in (0, 1, 5, 12)]
    assert verify_urn_lemmas("ineq", specs).holds


def test_generalized_equilibrium_domination_needs_one_black_ball():
    # with two initial black balls the comparison can fail
    rep = verify_urn_lemmas("ineq", [UrnSpec(2, 1, 12, 1)])
    assert not rep.holds


def test_unknown_lemma():
    with pytest.raises(ValueError):
        verify_urn_lemmas("nope", [])


def test_second_moment_growth():
    # E N_n(1,2)^2 grows like 4n for large n
    n = 2000
    ratio = second_moment(UrnSpec(1, 2, n, 1)) / (4 * n)
    assert abs(float(ratio) - 1) < 0.05


def test_moment_bound_best_m_is_interior():
    best, bound, values = moment_tail_bound(200, 2, range(1, 30))
    assert 1 <= best < 29
    assert bound == min(values.values())
