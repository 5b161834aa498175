import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqk.dist import FiniteDist, thin, zero_truncate
from eqk.errors import SupportAtZero
from eqk.orders import dominates
from eqk.randdist import random_difr, random_dist, random_log_concave
from eqk.reliability import (
    classify,
    hazard,
    is_difr,
    is_log_concave,
    is_nbue,
    is_nbuezt,
    nbue_margins,
    residual_laws_decreasing,
)
from eqk.transforms import discrete_equilibrium

from conftest import dists

F = Fraction


def test_geometric_like_hazard():
    d = FiniteDist.from_dict({1: F(1, 2), 2: F(1, 4), 3: F(1, 4)})
    assert hazard(d) == (F(1, 2), F(1, 2), F(1))
    assert is_difr(d).verdict and is_nbue(d).verdict
    # (1/4)^2 < (1/2)(1/4): D-IFR without log-concavity
    assert is_log_concave(d).witness == 2


def test_decreasing_hazard_fails_with_witness():
    d = FiniteDist.from_dict({1: F(1, 2), 2: F(1, 8), 3: F(3, 8)})
    # h(1) = 1/2, h(2) = 1/4, h(3) = 1
    rep = is_difr(d)
    assert not rep.verdict and rep.witness == 2


def test_not_nbue():
    # a long tail behind a likely small value
    d = FiniteDist.from_dict({1: F(9, 10), 10: F(1, 10)})
    rep = is_nbue(d)
    assert not rep.verdict
    assert rep.witness == 1
    assert not dominates(discrete_equilibrium(d), d).holds


def test_internal_zero_breaks_log_concavity():
    rep = is_log_concave(FiniteDist.from_dict({1: F(1, 2), 3: F(1, 2)}))
    assert not rep.verdict and rep.details["reason"] == "internal zero"


def test_support_at_zero_rejected():
    d = FiniteDist.from_dict({0: F(1, 2), 2: F(1, 2)})
    with pytest.raises(SupportAtZero):
        is_difr(d)
    with pytest.raises(SupportAtZero):
        is_nbue(d)
    assert is_nbuezt(d).verdict
    out = classify(d)
    assert out["difr"]["verdict"] is None and out["nbuezt"]["verdict"] is True


@given(dists(min_point=1, max_point=10))
def test_nbue_margins_match_verdict(d):
    margins = nbue_margins(d)
    assert is_nbue(d).verdict == all(m >= 0 for m in margins)


@given(dists(min_point=1, max_point=10))
def test_hierarchy(d):
    lc, difr, nbue = is_log_concave(d).verdict, is_difr(d).verdict, is_nbue(d).verdict
    if lc:
        assert difr
    if difr:
        assert nbue


@given(dists(min_point=1, max_point=8))
def test_difr_iff_residual_laws_decrease(d):
    assert is_difr(d).verdict == residual_laws_decreasing(d).verdict


@given(st.integers(0, 10**6))
def test_generators_produce_their_class(seed):
    rng = random.Random(seed)
    assert is_log_concave(random_log_concave(rng)).verdict
    assert is_difr(random_difr(rng)).verdict
    random_dist(rng)


@given(st.integers(0, 10**6), st.fractions(min_value=F(1, 20), max_value=F(19, 20), max_denominator=20))
def test_difr_thinning_closure(seed, p):
    d = random_difr(random.Random(seed))
    assert is_difr(zero_truncate(thin(d, p))).verdict


def test_structured_corpus_hierarchy():
    rng = random.Random(11)
    counts = [0, 0, 0]
    for i in range(600):
        d = (random_log_concave, random_difr, random_dist)[i % 3](rng)
        lc, difr, nbue = is_log_concave(d).verdict, is_difr(d).verdict, is_nbue(d).verdict
        assert not (lc and not difr) and not (difr and not nbue)
        counts[0] += lc
        counts[1] += difr and not lc
        counts[2] += nbue and not difr
    # every strict inclusion is exercised
    assert all(c > 0 for c in counts)
