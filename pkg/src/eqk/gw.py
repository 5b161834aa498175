"""Galton-Watson generation laws by iterated compounding, and the closure checks.

``Z_0 = 1`` and ``Z_{n+1}`` is a sum of ``L`` independent copies of ``Z_n``,
so every generation is one call to :func:`~eqk.dist.compound`.  In exact mode
the cap is ``max(L)**n`` and nothing is lost.  Truncated mode exists for the
geometric fixtures: the child is a :class:`~eqk.dist.SubDist` and every
inequality is checked against the pessimistic value (exact part plus all
unaccounted mass).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bounds import BOUND_TOL, BoundSpec, analytic_fixture_checks, lower_tail_bound, upper_tail_bound
from .dist import FiniteDist, SubDist, compound, survival, thin, zero_truncate
from .errors import AllMassAtZero, BadParams, BudgetExceeded, HypothesisFailed
from .reliability import is_difr, is_log_concave, is_nbue, is_nbuezt, nbue_margins
from .report import CheckReport

__all__ = [
    "GWSpec",
    "gw_generation",
    "gw_generations",
    "conditional_mean",
    "truncated_geometric",
    "geometric_pmf",
    "default_t_grid",
    "verify_gw_closures",
    "verify_counterexamples",
    "COUNTEREXAMPLE_CHILD",
    "THINNING_CHILD",
    "EXACT_SUPPORT_BUDGET",
]

#: Largest cap accepted for exact compounding.
EXACT_SUPPORT_BUDGET = 200_000

#: Rounding used when the child is given as a truncated law.
TRUNCATED_PRECISION_BITS = 200

COUNTEREXAMPLE_CHILD = FiniteDist.from_dict({1: Fraction(1, 8), 2: Fraction(49, 64), 3: Fraction(7, 64)})
THINNING_CHILD = FiniteDist.from_dict({
    1: Fraction(89, 100),
    2: Fraction(109, 1000),
    3: Fraction(9, 10000),
    4: Fraction(1, 11250),
    5: Fraction(1, 90000),
})


@dataclass(frozen=True)
class GWSpec:
    """Child law, number of generations, cap and the allowed lost mass.

    ``cap=None`` means exact mode with ``cap = max(child)**n``.
    """

    child: object
    generations: int
    cap: int | None = None
    truncated_mass_budget: Fraction = Fraction(0)

    def __post_init__(self):
        if self.generations < 0:
            raise BadParams("generations must be nonnegative")
        if self.cap is not None and self.cap < self.child.max:
            raise BadParams(f"cap {self.cap} is below max(child) = {self.child.max}")
        object.__setattr__(self, "truncated_mass_budget", Fraction(self.truncated_mass_budget))

    @property
    def exact_mode(self) -> bool:
        return self.cap is None and isinstance(self.child, FiniteDist)


def _exact_cap(child, n: int) -> int:
    return max(child.max, 1) ** n


def gw_generations(spec: GWSpec):
    """Yield ``(n, Z_n, truncated_mass)`` for ``n = 0 .. spec.generations``."""
    z = FiniteDist.point(1)
    lost = Fraction(0)
    yield 0, z, lost
    truncated_child = isinstance(spec.child, SubDist)
    for n in range(1, spec.generations + 1):
        if spec.cap is None:
            cap = _exact_cap(spec.child, n)
            if cap > EXACT_SUPPORT_BUDGET:
                raise BudgetExceeded(f"exact Z_{n} needs {cap} atoms; pass a cap")
        else:
            cap = spec.cap
        bits = TRUNCATED_PRECISION_BITS if truncated_child else None
        z, lost = compound(spec.child, z, cap=cap, precision_bits=bits)
        if lost > spec.truncated_mass_budget:
            raise BudgetExceeded(f"Z_{n} lost mass {float(lost):.3g} > budget {float(spec.truncated_mass_budget):.3g}")
        yield n, z, lost


def gw_generation(spec: GWSpec):
    """``(Z_n, truncated_mass)``; ``Z_n`` is a :class:`SubDist` when mass was lost."""
    for _, z, lost in gw_generations(spec):
        pass
    return z, lost


def conditional_mean(z) -> Fraction:
    """``E[Z | Z > 0]``."""
    tail = survival(z, 0)
    if tail == 0:
        raise AllMassAtZero("P[Z > 0] = 0")
    return z.mean / tail


def truncated_geometric(p, cap: int) -> SubDist:
    """``Geometric(p)`` on ``{1, 2, ...}`` restricted to ``k <= cap`` (mass ``1 - (1-p)^cap``)."""
    p = Fraction(p)
    q = 1 - p
    return SubDist(tuple(range(1, cap + 1)), tuple(p * q ** (k - 1) for k in range(1, cap + 1)))


def geometric_pmf(p, k: int) -> Fraction:
    p = Fraction(p)
    return p * (1 - p) ** (k - 1) if k >= 1 else Fraction(0)


def default_t_grid() -> list:
    return [Fraction(i, 10) for i in range(1, 51)]


# ---------------------------------------------------------------------------
# closure checks


_UNIT = BoundSpec(1, 1, 1)


def _record_tails(rep, n, law, scale, lost, grid, prefix=""):
    """Upper and lower tail bounds for ``law`` at ``t * scale``; ``lost`` is added pessimistically."""
    for t in grid:
        x = t * scale
        up = survival(law, x, strict=False) + lost
        rep.record((prefix + "upper", n, t), upper_tail_bound(_UNIT, t) - up + BOUND_TOL)
        low = law.mass - survival(law, x) + lost
        rep.record((prefix + "lower", n, t), lower_tail_bound(_UNIT, t) - low + BOUND_TOL)


def _nbue_toleranced(z: SubDist, lost: Fraction, cap: int):
    """NBUE margins of the renormalized truncated law against a slack of ``4 cap lost``."""
    tol = 4 * cap * lost
    worst = min(nbue_margins(z.renormalized())[1:], default=Fraction(0))
    return worst + tol >= 0, worst, tol


def _gw1(child, n_max, cap, budget, grid) -> CheckReport:
    rep = CheckReport("gw1", params={"n_max": n_max, "cap": cap})
    if child.points[0] == 0:
        raise HypothesisFailed(f"gw1 needs P[L=0] = 0; here P[L=0] = {child.weights[0]}")
    base = child.renormalized() if isinstance(child, SubDist) else child
    if not is_nbue(base):
        raise HypothesisFailed("the child law is not NBUE")
    mu = base.mean
    truncated = isinstance(child, SubDist)
    if truncated:
        rep.exact = False
        p = child.weights[0]
        geometric = child.points[0] == 1 and all(w == geometric_pmf(p, k) for k, w in child)
        rep.params["truncated_mass_budget"] = budget
    spec = GWSpec(child, n_max, cap if truncated else None, budget if truncated else Fraction(0))
    prev_alive = Fraction(1)
    for n, z, lost in gw_generations(spec):
        if n == 0:
            continue
        if truncated:
            ok, worst, tol = _nbue_toleranced(z, lost, spec.cap)
            rep.record(("nbue", n), worst + tol, ok=ok)
            rep.params[f"lost_mass_{n}"] = lost
            if lost > 0:
                rep.notes.append(f"Z_{n}: NBUE checked on the renormalized truncated law with slack {float(tol):.3g}")
        if truncated and geometric:
            # pointwise comparison with Geometric(p^n); computed atoms are lower bounds
            gp = p**n
            gap = max((geometric_pmf(gp, k) - z.pmf(k) for k in range(1, spec.cap + 1)), default=Fraction(0))
            low = min((geometric_pmf(gp, k) - z.pmf(k) for k in z.points), default=Fraction(0))
            rep.record(("geometric_match", n), lost - gap, ok=gap <= lost and low >= 0)
        if not truncated:
            rep.record(("nbue", n), Fraction(0), ok=is_nbue(z).verdict)
            rep.record(("mean", n), Fraction(0), ok=z.mean == mu**n)
        alive = survival(z, 0)
        rep.record(("survival_monotone", n), prev_alive - alive)
        prev_alive = alive
        _record_tails(rep, n, z, mu**n, lost, grid)
    return rep


def _gw2(child, n_max, grid, explore: bool) -> CheckReport:
    if child.points[-1] == 0:
        raise AllMassAtZero("child law is concentrated at 0")
    zt = zero_truncate(child)
    difr = is_difr(zt).verdict
    name = "gw2"
    if not difr:
        if not (explore and is_nbuezt(child).verdict):
            raise HypothesisFailed("the zero-truncated child law is not D-IFR")
        name = "gw2_explore"
    rep = CheckReport(name, params={"n_max": n_max, "child_difr": difr})
    if name == "gw2_explore":
        rep.notes.append("child is NBUEZT but not D-IFR: outcomes are reported, not asserted by any theorem")
    prev_alive = Fraction(1)
    mu = child.mean
    for n, z, _ in gw_generations(GWSpec(child, n_max)):
        if n == 0:
            continue
        if survival(z, 0) == 0:
            rep.notes.append(f"Z_{n} is extinct almost surely; stopping")
            break
        v = is_nbuezt(z)
        rep.record(("nbuezt", n), Fraction(0), ok=v.verdict)
        if not v.verdict:
            rep.witnesses.append(("nbuezt_witness", n, v.witness))
        rep.record(("mean", n), Fraction(0), ok=z.mean == mu**n)
        alive = survival(z, 0)
        rep.record(("survival_monotone", n), prev_alive - alive)
        prev_alive = alive
        m = conditional_mean(z)
        rep.params[f"m_{n}"] = m
        _record_tails(rep, n, zero_truncate(z), m, Fraction(0), grid, prefix="cond_")
    return rep


def _randsum(count, summand) -> CheckReport:
    rep = CheckReport("randsum")
    p = survival(summand, 0)
    if not is_nbuezt(summand).verdict:
        raise HypothesisFailed("the summand law is not NBUEZT")
    thinned = thin(count, p)
    if survival(thinned, 0) == 0 or not is_nbuezt(thinned).verdict:
        raise HypothesisFailed("the thinned count law is not NBUEZT")
    s, _ = compound(count, summand)
    rep.record("nbuezt", Fraction(0), ok=is_nbuezt(s).verdict)
    # the same sum written over the nonzero summands only
    alt, _ = compound(thinned, zero_truncate(summand))
    rep.record("representation", Fraction(0), ok=alt == s)
    rep.params.update({"p": p})
    return rep


def verify_gw_closures(kind: str, child, n_max: int = 3, *, summand=None, cap: int = 2000,
                       budget=Fraction(1, 2**50), t_grid=None, explore: bool = False) -> CheckReport:
    """Run ``gw1``, ``gw2`` or ``randsum`` on ``child``.

    ``gw1`` accepts a :class:`SubDist` child (truncated mode, ``cap`` and
    ``budget`` apply).  ``randsum`` uses ``child`` as the count law and
    ``summand`` (default: ``child``) as the summand law.  A child outside the
    theorem's hypothesis raises :class:`HypothesisFailed`, except that
    ``gw2`` with ``explore=True`` runs NBUEZT children that are not D-IFR and
    just reports what happens.
    """
    grid = default_t_grid() if t_grid is None else [Fraction(t) for t in t_grid]
    if kind == "gw1":
        return _gw1(child, n_max, cap, Fraction(budget), grid)
    if kind == "gw2":
        if isinstance(child, SubDist):
            raise BadParams("gw2 runs in exact mode only")
        return _gw2(child, n_max, grid, explore)
    if kind == "randsum":
        return _randsum(child, child if summand is None else summand)
    raise BadParams(f"unknown GW check {kind!r}; choose gw1, gw2 or randsum")


def verify_counterexamples(thin_grid=None, capped=None) -> CheckReport:
    """The three sharpness examples for the GW and thinning results."""
    rep = CheckReport("counterexamples")
    c1 = COUNTEREXAMPLE_CHILD
    z2, _ = gw_generation(GWSpec(c1, 2))
    lc_child, difr_child = is_log_concave(c1), is_difr(c1)
    lc_z2, difr_z2 = is_log_concave(z2), is_difr(z2)
    rep.record(("c1", "child_log_concave"), Fraction(0), ok=lc_child.verdict)
    rep.record(("c1", "child_difr"), Fraction(0), ok=difr_child.verdict)
    rep.record(("c1", "z2_not_log_concave"), Fraction(0), ok=not lc_z2.verdict)
    rep.record(("c1", "z2_not_difr"), Fraction(0), ok=not difr_z2.verdict)
    rep.params["c1"] = {
        "z2": z2,
        "z2_log_concave_witness": lc_z2.witness,
        "z2_difr_witness": difr_z2.witness,
        "z2_hazard": list(difr_z2.hazard),
    }

    L = THINNING_CHILD
    rep.record(("c2", "nbue"), Fraction(0), ok=is_nbue(L).verdict)
    grid = [Fraction(i, 100) for i in range(1, 100)] if thin_grid is None else [Fraction(p) for p in thin_grid]
    passing = []
    for p in grid:
        v = is_nbuezt(thin(L, p))
        if v.verdict:
            passing.append(p)
    rep.record(("c2", "all_thinnings_fail_nbuezt"), Fraction(0), ok=not passing)
    rep.params["c2"] = {"thin_grid_size": len(grid), "thinnings_passing": passing}

    c3 = analytic_fixture_checks("capped", capped or {"mu": 1000, "t": 3, "rtol": "0.002"})
    rep.merge(c3, prefix="c3")
    rep.exact = False
    return rep
