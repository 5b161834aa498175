"""The acceptance suite as a registry of named criteria.

Each criterion returns one :class:`CheckReport` (with its runtime in
``params["seconds"]``).  ``budget="full"`` runs the stated sizes;
``budget="small"`` shrinks grids and sample counts for a quick smoke run and
widens the Monte Carlo threshold by the square root of the sample ratio.
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

from . import _real
from .bounds import analytic_fixture_checks, check_bounds_against, verify_tail_lemmas
from .dist import FiniteDist, thin, zero_truncate
from .gw import truncated_geometric, verify_counterexamples, verify_gw_closures
from .randdist import random_difr, random_dist, random_log_concave, random_schedule
from .reliability import is_difr, is_log_concave, is_nbue
from .report import CheckReport
from .sims import TV_THRESHOLD, crossvalidate
from .transforms import power_bias, rising_factorial_moment, verify_transform_identities
from .urn import (
    UrnSpec,
    moment_tail_bound,
    rf_moment,
    rf_moment_closed_form,
    urn_pmf,
    urn_rows,
    verify_urn_lemmas,
)

__all__ = ["CRITERIA", "run_criterion", "run_all"]

SEED = 20240611


def _small(budget: str) -> bool:
    if budget not in ("small", "full"):
        raise ValueError("budget must be 'small' or 'full'")
    return budget == "small"


def _sub(rep: CheckReport, name: str, sub: CheckReport):
    rep.merge(sub, prefix=name)
    rep.params[f"{name}_holds"] = sub.holds


def c01_urn_recurrence(budget: str) -> CheckReport:
    rep = CheckReport("urn_recurrence")
    d = urn_pmf(UrnSpec(1, 1, 2, 1))
    want = FiniteDist.from_dict({1: Fraction(3, 8), 2: Fraction(3, 8), 3: Fraction(1, 4)})
    rep.record("example", Fraction(0), ok=d == want)
    n_max = 50 if _small(budget) else 200
    bad = []
    for b in range(4):
        for w in range(1, 5):
            for l in range(1, 4):
                for m, row, den in urn_rows(UrnSpec(b, w, n_max, l)):
                    if sum(row) != den:
                        bad.append((b, w, l, m))
    rep.record("mass_one", Fraction(0), ok=not bad)
    rep.witnesses.extend(bad)
    rep.params["n_max"] = n_max
    return rep


def c02_urn_lemmas(budget: str) -> CheckReport:
    rep = CheckReport("urn_lemmas")
    n = 20 if _small(budget) else 50
    specs = [UrnSpec(b, w, n, l) for b in range(4) for w in range(1, 5) for l in range(1, 4)]
    for kind in ("lc", "tech", "variant"):
        _sub(rep, kind, verify_urn_lemmas(kind, specs))
    rng = random.Random(SEED)
    count = 20 if _small(budget) else 100
    sched = []
    for _ in range(count):
        b, w = rng.randint(0, 3), rng.randint(1, 4)
        sched.append(UrnSpec(b, w, n, schedule=random_schedule(rng, b + w, n)))
    _sub(rep, "tech_random_schedule", verify_urn_lemmas("tech", sched))
    rep.params.update(n_max=n, random_schedules=count)
    return rep


def c03_urn_proposition(budget: str) -> CheckReport:
    rep = CheckReport("urn_proposition")
    ns = [0, 1, 2, 5, 10, 20, 50] if _small(budget) else range(0, 51)
    specs = [UrnSpec(1, w, n, l) for w in range(1, 5) for l in range(1, 4) for n in ns]
    _sub(rep, "ineq", verify_urn_lemmas("ineq", specs))
    _sub(rep, "unfac", verify_urn_lemmas("unfac", specs))
    rep.params["specs"] = len(specs)
    return rep


def c04_application_bounds(budget: str) -> CheckReport:
    rep = CheckReport("application_bounds", exact=False)
    up = [Fraction(10 + 2 * i, 10) for i in range(11)]
    low = [Fraction(5 * i, 100) for i in range(1, 11)]
    d22 = urn_pmf(UrnSpec(1, 2, 100, 1))
    _sub(rep, "w2_upper", check_bounds_against(d22, 2, 2, 1, t_grid=up))
    _sub(rep, "w2_lower", check_bounds_against(d22, 2, 2, 1, lower_grid=low))
    d12 = urn_pmf(UrnSpec(1, 1, 100, 1))
    _sub(rep, "w1_upper", check_bounds_against(d12, 1, 2, 1, t_grid=up))
    return rep


def c05_moment_comparison(budget: str) -> CheckReport:
    rep = CheckReport("moment_comparison", exact=False)
    n_max = 30 if _small(budget) else 100
    bad = []
    for m, row, den in urn_rows(UrnSpec(1, 2, n_max, 1)):
        d = FiniteDist.from_pairs((2 + i, Fraction(a, den)) for i, a in enumerate(row) if a)
        spec = UrnSpec(1, 2, m, 1)
        for r in range(1, 6):
            if rising_factorial_moment(d, 2 * r) != rf_moment_closed_form(m, r):
                bad.append(("closed_form", m, r))
            if rising_factorial_moment(d, r) != rf_moment(spec, r):
                bad.append(("product_form", m, r))
    rep.record("moments_match", Fraction(0), ok=not bad)
    rep.witnesses.extend(bad)
    ctx = _real.ctx
    n = 10**4
    _, b3, _ = moment_tail_bound(n, 3)
    rep.record("t3_exceeds_e^-8", b3 - ctx.exp(-8))
    _, b4, _ = moment_tail_bound(n, 4)
    ratio = b4 / ctx.exp(1 - 16)
    rep.record("t4_ratio_at_least_1", ratio - 1)
    rep.params.update(n=n, bound_t3=b3, bound_t4=b4, ratio_t4=ratio)
    return rep


def c06_counterexamples(budget: str) -> CheckReport:
    capped = {"mu": 100, "t": 3, "rtol": "0.02"} if _small(budget) else None
    return verify_counterexamples(capped=capped)


def c07_gw_closures(budget: str) -> CheckReport:
    rep = CheckReport("gw_closures", exact=False)
    _sub(rep, "gw1", verify_gw_closures("gw1", truncated_geometric(Fraction(1, 2), 60), 3,
                                         cap=2000, budget=Fraction(1, 2**50)))
    child = FiniteDist.from_dict({0: Fraction(1, 4), 1: Fraction(1, 4), 2: Fraction(1, 2)})
    _sub(rep, "gw2", verify_gw_closures("gw2", child, 4))
    return rep


def c08_sharpness(budget: str) -> CheckReport:
    rep = CheckReport("sharpness", exact=False)
    _sub(rep, "capped_mu10", analytic_fixture_checks("capped", {"mu": 10, "t": 2}))
    if not _small(budget):
        _sub(rep, "capped_mu1000", analytic_fixture_checks("capped", {"mu": 1000, "t": 3, "rtol": "0.002"}))
    _sub(rep, "mixture", analytic_fixture_checks("mixture", {"a": 2, "b": Fraction(1, 2)}))
    return rep


def c09_transform_identities(budget: str) -> CheckReport:
    rep = CheckReport("transform_identities")
    count = 100 if _small(budget) else 1000
    rng = random.Random(SEED + 9)
    failures = {"sum": 0, "mixture": 0, "power_to_factorial": 0, "thinning": 0, "power_bias": 0}
    for _ in range(count):
        d = random_dist(rng, max_point=6, min_point=0, max_size=4)
        if d.mean > 0 and not verify_transform_identities("sum", d, n=rng.randint(1, 3)).holds:
            failures["sum"] += 1
        parts = [random_dist(rng, max_point=6, min_point=1, max_size=4) for _ in range(rng.randint(1, 3))]
        ws = [Fraction(rng.randint(1, 5)) for _ in parts]
        ws = [w / sum(ws) for w in ws]
        if not verify_transform_identities("mixture", weights=ws, parts=parts).holds:
            failures["mixture"] += 1
        e = random_dist(rng, max_point=10, min_point=1)
        if not verify_transform_identities("power_to_factorial", e, l=rng.randint(1, 3)).holds:
            failures["power_to_factorial"] += 1
        p, q = Fraction(rng.randint(0, 10), 10), Fraction(rng.randint(0, 10), 10)
        if thin(thin(d, p), q) != thin(d, p * q):
            failures["thinning"] += 1
        a, b = rng.randint(0, 3), rng.randint(0, 3)
        if power_bias(power_bias(e, a), b) != power_bias(e, a + b):
            failures["power_bias"] += 1
    for key, bad in failures.items():
        rep.record(key, Fraction(0), ok=bad == 0)
    rep.params.update(instances=count, failures=failures)
    return rep


def c10_reliability(budget: str) -> CheckReport:
    rep = CheckReport("reliability_hierarchy")
    count = 1000 if _small(budget) else 10_000
    rng = random.Random(SEED + 10)
    chain_bad = []
    seen = {"log_concave": 0, "difr": 0, "nbue": 0}
    for i in range(count):
        gen = (random_log_concave, random_difr, random_dist)[i % 3]
        d = gen(rng)
        lc = is_log_concave(d).verdict
        difr = is_difr(d).verdict
        nbue = is_nbue(d).verdict  # raises if the two NBUE routes disagree
        seen["log_concave"] += lc
        seen["difr"] += difr
        seen["nbue"] += nbue
        if (lc and not difr) or (difr and not nbue):
            chain_bad.append(i)
    rep.record("hierarchy", Fraction(0), ok=not chain_bad)
    rep.witnesses.extend(chain_bad[:10])
    thin_bad = []
    n_thin = 100 if _small(budget) else 1000
    ps = [Fraction(i, 10) for i in range(1, 10)]
    for i in range(n_thin):
        d = random_difr(rng)
        for p in ps:
            t = thin(d, p)
            if not is_difr(zero_truncate(t)).verdict:
                thin_bad.append((i, p))
    rep.record("difr_thinning", Fraction(0), ok=not thin_bad)
    rep.witnesses.extend(thin_bad[:10])
    rep.params.update(dists=count, class_counts=seen, thinning_dists=n_thin, nbue_routes="agree")
    return rep


def c11_crossvalidation(budget: str) -> CheckReport:
    rep = CheckReport("crossvalidation", exact=False)
    samples = 20_000 if _small(budget) else 100_000
    thr = TV_THRESHOLD * math.sqrt(100_000 / samples)
    cases = [
        ("pref_attach", {"w": 1, "l": 1, "n": 30}),
        ("walk_local_time", {"steps": 40}),
        ("walk_bridge_local_time", {"steps": 40}),
        ("binary_tree_subtree", {"n_leaves": 20, "k": 2}),
    ]
    for i, (model, params) in enumerate(cases):
        r = crossvalidate(model, params, samples=samples, seed=SEED + i, threshold=thr)
        _sub(rep, model, r)
        rep.params[f"{model}_tv"] = r.params["tv"]
    exhaustive = [
        ("pref_attach", {"w": 1, "l": 1, "n": 1}),
        ("pref_attach", {"w": 1, "l": 1, "n": 3}),
        ("pref_attach", {"w": 2, "l": 2, "n": 3}),
        ("walk_local_time", {"steps": 2}),
        ("walk_local_time", {"steps": 8}),
        ("walk_bridge_local_time", {"steps": 6}),
        ("binary_tree_subtree", {"n_leaves": 3, "k": 1}),
        ("binary_tree_subtree", {"n_leaves": 5, "k": 2}),
    ]
    for model, params in exhaustive:
        r = crossvalidate(model, params, samples=None)
        label = f"exhaustive_{model}_" + "_".join(f"{k}{v}" for k, v in params.items())
        _sub(rep, label, r)
    rep.params.update(samples=samples, threshold=thr)
    return rep


def c12_tail_lemmas(budget: str) -> CheckReport:
    rep = CheckReport("tail_lemmas", exact=False)
    count = 100 if _small(budget) else 1000
    rng = random.Random(SEED + 12)
    rec_fail = 0
    for _ in range(count):
        d = random_dist(rng, max_point=12, min_point=0)
        for kind in ("recexp", "recbnd"):
            if not verify_tail_lemmas(kind, d).holds:
                rec_fail += 1
    rep.record("record_lemmas", Fraction(0), ok=rec_fail == 0)
    grid = [Fraction(i, 4) for i in range(1, 13)]
    # beta = l + 1 and alpha = w, so w = l gives beta - alpha = 1 and w = l + 2 gives -1
    n = 30 if _small(budget) else 60
    for w, l in ((1, 1), (2, 2), (3, 1), (3, 3), (4, 2)):
        d = urn_pmf(UrnSpec(1, w, n, l))
        for kind in ("int", "mrl"):
            _sub(rep, f"{kind}_w{w}_l{l}", verify_tail_lemmas(kind, d, w, l + 1, 1, grid))
    rep.params.update(random_dists=count, urn_n=n, record_failures=rec_fail)
    return rep


CRITERIA = {
    1: c01_urn_recurrence,
    2: c02_urn_lemmas,
    3: c03_urn_proposition,
    4: c04_application_bounds,
    5: c05_moment_comparison,
    6: c06_counterexamples,
    7: c07_gw_closures,
    8: c08_sharpness,
    9: c09_transform_identities,
    10: c10_reliability,
    11: c11_crossvalidation,
    12: c12_tail_lemmas,
}


def run_criterion(number: int, budget: str = "full") -> CheckReport:
    start = time.perf_counter()
    rep = CRITERIA[number](budget)
    rep.params["criterion"] = number
    rep.params["budget"] = budget
    rep.params["seconds"] = round(time.perf_counter() - start, 3)
    return rep


def run_all(budget: str = "full", numbers=None) -> list:
    return [run_criterion(i, budget) for i in (numbers or sorted(CRITERIA))]
