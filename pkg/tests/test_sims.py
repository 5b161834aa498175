import math
from fractions import Fraction

import pytest

from eqk.dist import FiniteDist, moment
from eqk.errors import BadConfig, BudgetExceeded
from eqk.sims import (
    EmpiricalDist,
    SimConfig,
    crossvalidate,
    enumerate_model,
    exact_law,
    parse_model,
    simulate,
    tv_distance,
    urn_map,
)
from eqk.urn import UrnSpec

F = Fraction


def test_gw_point_mass_simulation():
    emp = simulate(SimConfig("gw", {"child": FiniteDist.point(2), "n": 3}, 500))
    assert emp.counts == {8: 500}


def test_tiny_enumerations():
    assert enumerate_model("walk_local_time", {"steps": 2}).as_dict() == {1: F(1, 2), 2: F(1, 2)}
    assert enumerate_model("pref_attach", {"w": 1, "l": 1, "n": 1}).as_dict() == {1: F(1, 2), 2: F(1, 2)}
    assert enumerate_model("walk_bridge_local_time", {"steps": 2}).as_dict() == {2: F(1)}


def test_tv_examples():
    d = FiniteDist.from_dict({1: F(1, 2), 2: F(1, 2)})
    assert tv_distance(EmpiricalDist({1: 5, 2: 5}, 10), d) == 0
    assert tv_distance(EmpiricalDist({3: 10}, 10), d) == 1
    assert tv_distance(d, d) == 0
    assert tv_distance(EmpiricalDist({1: 3, 2: 1}, 4), d) == F(1, 4)


def test_empirical_moments():
    e = EmpiricalDist({1: 1, 3: 1}, 2)
    assert e.mean == 2 and e.var == 1
    assert e.to_dist().as_dict() == {1: F(1, 2), 3: F(1, 2)}
    assert e.to_dict() == {"samples": 2, "counts": {"1": 1, "3": 1}}
    with pytest.raises(BadConfig):
        EmpiricalDist({1: 1}, 2)


@pytest.mark.parametrize("model,params", [
    ("pref_attach", {"w": 2, "l": 2, "n": 30}),
    ("walk_local_time", {"steps": 40}),
    ("walk_bridge_local_time", {"steps": 40}),
    ("binary_tree_subtree", {"n_leaves": 20, "k": 3}),
])
def test_same_output_for_any_worker_count(model, params):
    a = simulate(SimConfig(model, params, 10_000, 5, workers=1))
    b = simulate(SimConfig(model, params, 10_000, 5, workers=3))
    assert a.counts == b.counts
    c = simulate(SimConfig(model, params, 10_000, 6, workers=1))
    assert c.counts != a.counts


def test_local_time_is_at_least_one():
    emp = simulate(SimConfig("walk_local_time", {"steps": 31}, 5000, 1))
    assert min(emp.counts) >= 1
    emp = simulate(SimConfig("walk_local_time", {"steps": 0}, 10, 1))
    assert emp.counts == {1: 10}


def test_bridge_mean_within_four_standard_errors():
    law = exact_law("walk_bridge_local_time", {"steps": 60})
    emp = simulate(SimConfig("walk_bridge_local_time", {"steps": 60}, 40_000, 2))
    var = moment(law, 2) - law.mean**2
    se = math.sqrt(float(var) / emp.samples)
    assert abs(emp.mean - float(law.mean)) < 4 * se


def test_urn_map():
    assert urn_map("pref_attach", {"w": 3, "l": 2, "n": 7}) == UrnSpec(1, 3, 7, 2)
    assert urn_map("walk_local_time", {"steps": 10}) == UrnSpec(1, 1, 5, 1)
    assert urn_map("walk_bridge_local_time", {"steps": 10}) == UrnSpec(0, 1, 5, 1)
    assert urn_map("binary_tree_subtree", {"n_leaves": 10, "k": 3}) == UrnSpec(1, 6, 6, 1)
    assert urn_map("gw", {"child": FiniteDist.point(1), "n": 1}) is None


@pytest.mark.parametrize("model,params", [
    ("pref_attach", {"w": 1, "l": 1, "n": 6}),
    ("pref_attach", {"w": 2, "l": 3, "n": 7}),
    ("walk_local_time", {"steps": 14}),
    ("walk_local_time", {"steps": 15}),
    ("walk_bridge_local_time", {"steps": 16}),
    ("binary_tree_subtree", {"n_leaves": 6, "k": 1}),
    ("binary_tree_subtree", {"n_leaves": 7, "k": 3}),
])
def test_exhaustive_agreement(model, params):
    rep = crossvalidate(model, params, samples=None)
    assert rep.holds and rep.params["tv"] == 0


def test_enumeration_limits():
    with pytest.raises(BudgetExceeded):
        enumerate_model("walk_local_time", {"steps": 40})


def test_monte_carlo_agreement():
    rep = crossvalidate("pref_attach", {"w": 1, "l": 1, "n": 40}, samples=50_000, seed=3)
    assert rep.params["tv"] < 0.02


def test_monte_carlo_detects_wrong_law():
    # a walk of 2n steps against a bridge's law should be far off
    emp = simulate(SimConfig("walk_local_time", {"steps": 40}, 20_000, 1))
    assert tv_distance(emp, exact_law("walk_bridge_local_time", {"steps": 40})) > 0.05


def test_parse_model():
    assert parse_model("pref_attach(w=1,l=2,n=30)") == ("pref_attach", {"w": 1, "l": 2, "n": 30})
    assert parse_model("walk_local_time:steps=8") == ("walk_local_time", {"steps": 8})
    name, params = parse_model("gw(child=0:1/4;1:1/4;2:1/2,n=3)")
    assert name == "gw" and params["child"].as_dict() == {0: F(1, 4), 1: F(1, 4), 2: F(1, 2)}
    for bad in ("nope(n=1)", "walk_local_time(steps=x)", "walk_local_time(8)"):
        with pytest.raises(BadConfig):
            parse_model(bad)


def test_parse_model_child_file(tmp_path):
    path = tmp_path / "child.json"
    path.write_text('{"support": [1, 2], "weights": ["1/2", "1/2"]}')
    _, params = parse_model(f"gw(child={path},n=2)")
    assert params["child"].as_dict() == {1: F(1, 2), 2: F(1, 2)}


@pytest.mark.parametrize("model,params,samples,kw", [
    ("nope", {}, 10, {}),
    ("walk_local_time", {}, 10, {}),
    ("walk_local_time", {"steps": 4}, 0, {}),
    ("walk_local_time", {"steps": 4}, 10, {"workers": 0}),
    ("walk_local_time", {"steps": 4}, 10, {"master_seed": -1}),
    ("walk_bridge_local_time", {"steps": 5}, 10, {}),
    ("binary_tree_subtree", {"n_leaves": 3, "k": 4}, 10, {}),
    ("pref_attach", {"w": 0, "l": 1, "n": 3}, 10, {}),
    ("walk_local_time", {"steps": 2.5}, 10, {}),
])
def test_bad_config(model, params, samples, kw):
    with pytest.raises(BadConfig):
        SimConfig(model, params, samples, **kw)
