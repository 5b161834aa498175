import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqk._real import ctx, to_mpf
from eqk.bounds import (
    BoundSpec,
    ExpMixture,
    analytic_fixture_checks,
    capped_geometric,
    check_bounds_against,
    lower_tail_bound,
    parse_grid,
    scaled_tail,
    upper_tail_bound,
    verify_tail_lemmas,
)
from eqk.dist import FiniteDist
from eqk.errors import BadParams, DomainError, HypothesisFailed
from eqk.reliability import is_nbue
from eqk.urn import UrnSpec, urn_pmf

from conftest import dists

F = Fraction


def close(a, b, tol=1e-12):
    return abs(to_mpf(a) - to_mpf(b)) < tol


def test_upper_examples():
    assert close(upper_tail_bound(BoundSpec(1, 1), 1), 1)
    assert close(upper_tail_bound(BoundSpec(1, 2), 2), 2 * math.exp(-2))
    assert close(upper_tail_bound(BoundSpec(2, 2, F(1, 2)), 2), math.exp(-1))
    with pytest.raises(DomainError):
        upper_tail_bound(BoundSpec(1, 2), F(1, 2))
    assert upper_tail_bound(BoundSpec(1, 2), F(1, 2), unsafe=True) > 0


def test_lower_examples():
    assert close(lower_tail_bound(BoundSpec(1, 1), F(1, 10)), F(1, 10))
    assert close(lower_tail_bound(BoundSpec(2, 2, F(1, 2)), F(1, 2)), F(1, 2))
    assert close(lower_tail_bound(BoundSpec(1, 2), F(1, 2)), math.sqrt(2))
    with pytest.raises(DomainError):
        lower_tail_bound(BoundSpec(1, 2), 1)


def test_bad_spec():
    with pytest.raises(BadParams):
        BoundSpec(1, 1, 0)
    with pytest.raises(BadParams):
        BoundSpec(-1, 1)


@given(st.fractions(min_value=F(1, 10), max_value=5, max_denominator=20),
       st.fractions(min_value=F(1, 10), max_value=5, max_denominator=20))
def test_equal_exponent_upper_decreasing(s, t):
    spec = BoundSpec(2, 2)
    if s < t:
        assert upper_tail_bound(spec, s) > upper_tail_bound(spec, t)


@given(st.fractions(min_value=1, max_value=4, max_denominator=10),
       st.fractions(min_value=F(1, 10), max_value=1, max_denominator=10),
       st.fractions(min_value=F(1, 10), max_value=1, max_denominator=10))
def test_upper_monotone_in_p(t, p, q):
    if p < q:
        assert upper_tail_bound(BoundSpec(1, 2, p), t) >= upper_tail_bound(BoundSpec(1, 2, q), t)
        assert upper_tail_bound(BoundSpec(2, 2, p), t) >= upper_tail_bound(BoundSpec(2, 2, q), t)


@given(st.fractions(min_value=F(1, 10), max_value=1, max_denominator=10))
def test_unequal_bound_at_one_never_informative(p):
    v = upper_tail_bound(BoundSpec(1, 2, p), 1)
    assert close(v, ctx.exp(2 - to_mpf(p)))
    assert v >= 1


def test_point_mass_tail_is_zero():
    rep = check_bounds_against(FiniteDist.point(1), 1, 1, 1, t_grid=[F(3, 2), 2, 3])
    assert rep.holds
    assert all(row[2] == 0 for row in rep.table)


def test_scaled_tail_uses_weak_inequality():
    # mu = E X / alpha = 1 for the point mass at 1
    assert scaled_tail(FiniteDist.point(1), 1, 1, 1) == 1


def test_hypothesis_refused():
    d = FiniteDist.from_dict({1: F(9, 10), 10: F(1, 10)})
    with pytest.raises(HypothesisFailed):
        check_bounds_against(d, 1, 1, 1, t_grid=[2])


def test_urn_bounds_hold():
    d = urn_pmf(UrnSpec(1, 2, 60, 1))
    rep = check_bounds_against(d, 2, 2, 1, t_grid=parse_grid("1:3:0.5"), lower_grid=parse_grid("0.1:0.5:0.1"))
    assert rep.holds
    d = urn_pmf(UrnSpec(1, 1, 60, 1))
    rep = check_bounds_against(d, 1, 2, 1, t_grid=[1, F(3, 2), 2, 3], lower_grid=[F(1, 10), F(1, 2)])
    assert rep.holds


def test_record_lemma_examples(two_point):
    rep = verify_tail_lemmas("recexp", two_point, t_grid=[2])
    assert close(rep.margins[0][1], math.log(2) - 0.5)
    rep = verify_tail_lemmas("recbnd", two_point, t_grid=[2])
    assert close(rep.margins[0][1], 0.5 * (1 + math.log(2)) - 0.75)
    rep = verify_tail_lemmas("recexp", FiniteDist.point(4), t_grid=[1, 4])
    assert all(close(m, 0) for _, m in rep.margins)


@given(dists(max_point=12))
def test_record_lemmas_random(d):
    assert verify_tail_lemmas("recexp", d).holds
    assert verify_tail_lemmas("recbnd", d).holds


def test_mrl_lemma_needs_unit_gap():
    with pytest.raises(BadParams):
        verify_tail_lemmas("mrl", urn_pmf(UrnSpec(1, 2, 10, 1)), 2, 2, 1, [1])


@pytest.mark.parametrize("w,l", [(1, 1), (2, 2), (3, 1), (3, 3), (4, 2)])
def test_integral_and_mrl_lemmas_for_urns(w, l):
    d = urn_pmf(UrnSpec(1, w, 40, l))
    grid = [F(i, 4) for i in range(1, 13)]
    assert verify_tail_lemmas("int", d, w, l + 1, 1, grid).holds
    assert verify_tail_lemmas("mrl", d, w, l + 1, 1, grid).holds


def test_capped_geometric_closed_form():
    d = capped_geometric(10, 10)
    assert d.pmf(20) == F(9, 10) ** 10
    assert is_nbue(d).verdict
    rep = analytic_fixture_checks("capped", {"mu": 10, "t": 2})
    assert rep.holds
    assert rep.params["tail"] == F(3486784401, 10**10)


def test_capped_geometric_bad_params():
    with pytest.raises(BadParams):
        analytic_fixture_checks("capped", {"mu": 1, "t": 2})
    with pytest.raises(BadParams):
        analytic_fixture_checks("nope", {})


def test_mixture_fixture():
    rep = analytic_fixture_checks("mixture", {"a": 2, "b": F(1, 2)})
    assert rep.holds
    assert abs(rep.params["p_numeric"] - to_mpf(F(2, 3))) < 1e-6
    assert abs(rep.params["small_t_ratio"] - 1) < 0.01


def test_mixture_closed_form_survivals():
    m = ExpMixture(2, F(1, 2))
    x, star = m.law(), m.star()
    assert close(x.survival(0), 1) and close(star.survival(0), 1)
    t = to_mpf(1)
    assert x.survival(t) > 0 and star.survival(t) > 0


def test_parse_grid():
    assert parse_grid("1:2:0.5") == [1, F(3, 2), 2]
    assert parse_grid("1/2,3") == [F(1, 2), 3]
    with pytest.raises(BadParams):
        parse_grid("1:2:0")


@pytest.mark.parametrize("seed", range(3))
def test_tail_lemmas_on_random_schedules(seed):
    rng = random.Random(seed)
    w = rng.randint(1, 3)
    d = urn_pmf(UrnSpec(1, w, 25, w))
    grid = [F(1, 2), 1, F(3, 2)]
    assert verify_tail_lemmas("int", d, w, w + 1, 1, grid).holds
    assert verify_tail_lemmas("mrl", d, w, w + 1, 1, grid).holds
