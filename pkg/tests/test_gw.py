import random
from fractions import Fraction

import pytest
from hypothesis import given

from eqk.dist import FiniteDist, SubDist, compound, survival, thin
from eqk.errors import AllMassAtZero, BadParams, BudgetExceeded, HypothesisFailed
from eqk.gw import (
    COUNTEREXAMPLE_CHILD,
    GWSpec,
    conditional_mean,
    gw_generation,
    gw_generations,
    truncated_geometric,
    verify_counterexamples,
    verify_gw_closures,
)
from eqk.randdist import random_dist, random_difr
from eqk.reliability import is_difr, is_nbue, is_nbuezt

from conftest import dists

F = Fraction


def test_point_mass_child():
    z, lost = gw_generation(GWSpec(FiniteDist.point(2), 3))
    assert z == FiniteDist.point(8) and lost == 0


def test_generation_zero_is_one():
    z, _ = gw_generation(GWSpec(FiniteDist.point(3), 0))
    assert z == FiniteDist.point(1)


def test_two_generations_by_hand():
    child = FiniteDist.from_dict({1: F(1, 2), 2: F(1, 2)})
    z, _ = gw_generation(GWSpec(child, 2))
    # Z_1 = 1: one child, Z_1 = 2: the sum of two children
    assert z.as_dict() == {1: F(1, 4), 2: F(3, 8), 3: F(1, 4), 4: F(1, 8)}


def test_conditional_mean():
    assert conditional_mean(FiniteDist.from_dict({0: F(1, 4), 1: F(1, 4), 2: F(1, 2)})) == F(5, 3)
    with pytest.raises(AllMassAtZero):
        conditional_mean(FiniteDist.point(0))


@given(dists(min_point=0, max_point=3, max_size=3))
def test_mean_is_multiplicative(child):
    mu = child.mean
    for n, z, lost in gw_generations(GWSpec(child, 3)):
        assert lost == 0
        assert z.mean == mu**n


@given(dists(min_point=0, max_point=3, max_size=3))
def test_survival_is_nonincreasing(child):
    alive = [survival(z, 0) for _, z, _ in gw_generations(GWSpec(child, 3))]
    assert all(a >= b for a, b in zip(alive, alive[1:]))


def test_exact_budget():
    with pytest.raises(BudgetExceeded):
        gw_generation(GWSpec(FiniteDist.point(10), 6))


def test_truncation_budget():
    child = truncated_geometric(F(1, 2), 20)
    with pytest.raises(BudgetExceeded):
        gw_generation(GWSpec(child, 2, cap=20, truncated_mass_budget=0))


def test_cap_below_child_max():
    with pytest.raises(BadParams):
        GWSpec(FiniteDist.point(5), 2, cap=3)


def test_gw1_refuses_zero_children():
    child = FiniteDist.from_dict({0: F(1, 4), 1: F(3, 4)})
    with pytest.raises(HypothesisFailed):
        verify_gw_closures("gw1", child)


def test_gw1_refuses_non_nbue():
    child = FiniteDist.from_dict({1: F(9, 10), 10: F(1, 10)})
    with pytest.raises(HypothesisFailed):
        verify_gw_closures("gw1", child)


def test_gw1_exact():
    child = FiniteDist.from_dict({1: F(1, 2), 2: F(1, 3), 3: F(1, 6)})
    rep = verify_gw_closures("gw1", child, 3)
    assert rep.holds
    # the tail bounds are transcendental, but no mass was truncated
    assert not any(k.startswith("lost_mass") for k in rep.params)


@pytest.mark.parametrize("p", [F(1, 2), F(2, 3)])
def test_gw1_truncated_geometric(p):
    rep = verify_gw_closures("gw1", truncated_geometric(p, 400), 3, cap=400)
    assert rep.holds
    assert not rep.exact
    assert any(label[0] == "geometric_match" for label, _ in rep.margins)


def test_gw2_on_difr_child_with_zeros():
    child = FiniteDist.from_dict({0: F(1, 4), 1: F(1, 4), 2: F(1, 2)})
    assert is_difr(FiniteDist.from_dict({1: F(1, 3), 2: F(2, 3)})).verdict
    rep = verify_gw_closures("gw2", child, 4)
    assert rep.holds
    assert rep.params["m_1"] == F(5, 3)


def test_gw2_gate_and_explore():
    # NBUEZT but the zero-truncated law is not D-IFR
    child = FiniteDist.from_dict({0: F(1, 10), 2: F(9, 20), 4: F(9, 20)})
    assert is_nbuezt(child).verdict and not is_difr(FiniteDist.from_dict({2: F(1, 2), 4: F(1, 2)})).verdict
    with pytest.raises(HypothesisFailed):
        verify_gw_closures("gw2", child, 2)
    rep = verify_gw_closures("gw2", child, 2, explore=True)
    assert rep.name == "gw2_explore" and rep.notes


def test_gw2_extinct_child():
    with pytest.raises(AllMassAtZero):
        verify_gw_closures("gw2", FiniteDist.point(0))


@pytest.mark.parametrize("seed", range(4))
def test_gw2_random_difr(seed):
    rng = random.Random(seed)
    zt = random_difr(rng, max_point=3)
    child = thin(zt, F(rng.randint(1, 9), 10))
    rep = verify_gw_closures("gw2", child, 3)
    assert rep.holds


def _random_nbue(rng, min_point):
    while True:
        d = random_dist(rng, max_point=6, min_point=min_point)
        if d.max > 0 and is_nbuezt(d).verdict:
            return d


def test_random_sums_of_nbue_pairs():
    rng = random.Random(11)
    for _ in range(1000):
        count, summand = _random_nbue(rng, 1), _random_nbue(rng, 1)
        assert is_nbue(count).verdict
        rep = verify_gw_closures("randsum", count, summand=summand)
        assert rep.holds, (count, summand)


def test_random_sums_with_zero_summands():
    rng = random.Random(12)
    done = 0
    while done < 200:
        count, summand = _random_nbue(rng, 1), _random_nbue(rng, 0)
        try:
            rep = verify_gw_closures("randsum", count, summand=summand)
        except HypothesisFailed:
            continue
        assert rep.holds
        done += 1


def test_randsum_representation_identity():
    count = FiniteDist.from_dict({1: F(1, 2), 2: F(1, 2)})
    summand = FiniteDist.from_dict({0: F(1, 3), 1: F(2, 3)})
    s, _ = compound(count, summand)
    assert s.as_dict() == {0: F(1, 6) + F(1, 18), 1: F(1, 3) + F(2, 9), 2: F(2, 9)}


def test_randsum_refuses_bad_summand():
    with pytest.raises(HypothesisFailed):
        verify_gw_closures("randsum", FiniteDist.point(2), summand=FiniteDist.from_dict({1: F(9, 10), 10: F(1, 10)}))


def test_unknown_kind():
    with pytest.raises(BadParams):
        verify_gw_closures("gw3", FiniteDist.point(1))
    with pytest.raises(BadParams):
        verify_gw_closures("gw2", truncated_geometric(F(1, 2), 10))


def test_counterexample_child_is_difr():
    assert is_difr(COUNTEREXAMPLE_CHILD).verdict


@pytest.mark.slow
def test_counterexamples():
    rep = verify_counterexamples()
    assert rep.holds
