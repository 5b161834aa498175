"""Tail-bound evaluators, the lemmas behind them, and two sharpness fixtures.

Discrete tails are exact.  Where a threshold ``mu * t`` is irrational the
count of atoms above it is still decided exactly whenever ``beta`` is an
integer: ``(mu t)**beta = (beta/alpha) E[X**beta] t**beta`` is then rational
and integer powers can be compared without rounding.  Bound values involve
``exp`` and real powers and are evaluated in high precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import _real
from ._real import MPF, to_mpf
from .dist import FiniteDist, _is_nonneg_int, _is_rational, as_fraction, moment, mu_factor, survival
from .errors import BadParams, DomainError, HypothesisFailed
from .orders import ltail_pmax, utail_pmax
from .report import CheckReport
from .transforms import gen_equilibrium, record_survival

__all__ = [
    "BoundSpec",
    "upper_tail_bound",
    "lower_tail_bound",
    "scaled_tail",
    "scaled_cdf",
    "check_bounds_against",
    "verify_tail_lemmas",
    "capped_geometric",
    "ExpMixture",
    "AnalyticLaw",
    "analytic_fixture_checks",
    "parse_grid",
    "BOUND_TOL",
]

#: Slack allowed on the real-valued side of a bound comparison.
BOUND_TOL = Fraction(1, 10**12)


def _num(x):
    """Keep rationals exact; everything else becomes ``mpf``."""
    if isinstance(x, MPF):
        return x
    if isinstance(x, float):
        return as_fraction(repr(x))
    if isinstance(x, str):
        return as_fraction(x)
    if _is_rational(x):
        return as_fraction(x)
    return to_mpf(x)


@dataclass(frozen=True)
class BoundSpec:
    alpha: object
    beta: object
    p: object = 1
    mu: object = 1

    def __post_init__(self):
        for name in ("alpha", "beta", "p", "mu"):
            object.__setattr__(self, name, _num(getattr(self, name)))
        if not (self.alpha > 0 and self.beta > 0 and self.mu > 0):
            raise BadParams("alpha, beta and mu must be positive")
        if not 0 < self.p <= 1:
            raise BadParams("p must lie in (0, 1]")

    @property
    def equal_exponents(self) -> bool:
        return self.alpha == self.beta


def _pow(x, y):
    return _real.ctx.power(to_mpf(x), to_mpf(y))


def upper_tail_bound(spec: BoundSpec, t, unsafe: bool = False):
    """Bound on ``P[X >= mu t]``: ``exp(1 - p t^beta)`` when ``alpha == beta``,
    otherwise ``t^alpha exp(2 - p t^beta)`` for ``t >= 1``."""
    t = _num(t)
    ctx = _real.ctx
    if spec.equal_exponents:
        if t <= 0 and not unsafe:
            raise DomainError("the alpha = beta upper bound needs t > 0")
        return ctx.exp(1 - to_mpf(spec.p) * _pow(t, spec.beta))
    if t < 1 and not unsafe:
        raise DomainError("the alpha != beta upper bound is only established for t >= 1")
    return _pow(t, spec.alpha) * ctx.exp(2 - to_mpf(spec.p) * _pow(t, spec.beta))


def lower_tail_bound(spec: BoundSpec, t, unsafe: bool = False):
    """Bound on ``P[X <= mu t]``: ``t^alpha / p`` when ``alpha == beta``,
    otherwise ``(a/b)^(1 - a/b) t^a / (a p / b - t^b)`` for ``t^b < p a / b``."""
    t = _num(t)
    if t < 0 and not unsafe:
        raise DomainError("t must be nonnegative")
    a, b, p = spec.alpha, spec.beta, spec.p
    if spec.equal_exponents:
        return _pow(t, a) / to_mpf(p)
    ratio = to_mpf(a) / to_mpf(b)
    gap = ratio * to_mpf(p) - _pow(t, b)
    if gap <= 0 and not unsafe:
        raise DomainError("the lower bound needs t^beta < p alpha / beta")
    return _pow(ratio, 1 - ratio) * _pow(t, a) / gap


# ---------------------------------------------------------------------------
# exact tails at rescaled thresholds


def _iroot_ceil(x: Fraction, r: int) -> int:
    """Smallest nonnegative integer ``k`` with ``k**r >= x``."""
    if x <= 0:
        return 0
    k = int(_real.ctx.floor(_real.ctx.root(to_mpf(x), r)))
    k = max(k - 1, 0)
    while k**r < x:
        k += 1
    return k


def _threshold(d: FiniteDist, alpha, beta, t):
    """``(power, value)`` describing ``mu t``.

    With integer ``beta`` and rational ``alpha, t`` this returns
    ``(beta, (mu t)**beta)`` exactly; otherwise ``(1, mu t)`` as an ``mpf``.
    """
    alpha, beta, t = _num(alpha), _num(beta), _num(t)
    if _is_nonneg_int(beta) and _is_rational(alpha) and _is_rational(t) and t >= 0:
        b = int(beta)
        return b, Fraction(b) / alpha * moment(d, b) * t**b
    return 1, to_mpf(mu_factor(d, alpha, beta)) * to_mpf(t)


def scaled_tail(d: FiniteDist, alpha, beta, t):
    """Exact ``P[X >= mu t]`` (weak inequality, as in the tail theorems)."""
    r, v = _threshold(d, alpha, beta, t)
    if r == 1 and isinstance(v, MPF):
        k = int(_real.ctx.ceil(v))
    else:
        k = _iroot_ceil(v, r)
    return survival(d, k, strict=False)


def scaled_cdf(d: FiniteDist, alpha, beta, t):
    """Exact ``P[X <= mu t]``."""
    r, v = _threshold(d, alpha, beta, t)
    if r == 1 and isinstance(v, MPF):
        k = int(_real.ctx.floor(v))
    else:
        k = _iroot_ceil(v, r)
        if k**r > v:
            k -= 1
    return 1 - survival(d, k, strict=True)


def _certify(d: FiniteDist, alpha, beta, p, kind: str):
    g = gen_equilibrium(d, alpha, beta)
    rep = utail_pmax(g, d) if kind == "utail" else ltail_pmax(g, d)
    raw = rep.raw_inf
    ok = raw is None or raw >= (p - _real.REAL_TOL if isinstance(raw, MPF) else p)
    if not ok:
        raise HypothesisFailed(f"{kind} order of X* below X holds only up to p = {rep.p_max}, not {p}")
    return rep


def check_bounds_against(d: FiniteDist, alpha, beta, p=1, t_grid=(), lower_grid=(),
                         tol=BOUND_TOL) -> CheckReport:
    """Compare exact tails of ``d`` with both tail bounds.

    The order hypothesis ``X* <=_p X`` is certified first (upper-tail order
    for ``t_grid``, lower-tail order for ``lower_grid``); the check refuses to
    run without it.  Grid points outside a bound's domain are skipped and
    listed in the notes.
    """
    spec = BoundSpec(alpha, beta, p, 1)
    rep = CheckReport("tail_bounds", params=dict(alpha=alpha, beta=beta, p=p), exact=False)
    rows = []
    if t_grid:
        cert = _certify(d, alpha, beta, spec.p, "utail")
        rep.params["utail_pmax"] = cert.p_max
        for t in t_grid:
            try:
                bound = upper_tail_bound(spec, t)
            except DomainError as exc:
                rep.notes.append(f"upper t={t}: skipped ({exc})")
                continue
            tail = scaled_tail(d, alpha, beta, t)
            margin = bound - to_mpf(tail)
            rep.record(("upper", _num(t)), margin, ok=margin >= -to_mpf(tol))
            rows.append(("upper", _num(t), tail, bound, margin))
    if lower_grid:
        cert = _certify(d, alpha, beta, spec.p, "ltail")
        rep.params["ltail_pmax"] = cert.p_max
        for t in lower_grid:
            try:
                bound = lower_tail_bound(spec, t)
            except DomainError as exc:
                rep.notes.append(f"lower t={t}: skipped ({exc})")
                continue
            c = scaled_cdf(d, alpha, beta, t)
            margin = bound - to_mpf(c)
            rep.record(("lower", _num(t)), margin, ok=margin >= -to_mpf(tol))
            rows.append(("lower", _num(t), c, bound, margin))
    rep.table.extend(rows)
    return rep


# ---------------------------------------------------------------------------
# lemmas


def _int_lemma(d, alpha, beta, p, t_grid, tol, rep):
    """``int_0^1 u^(a-b-1) G(t/u) du <= G(t) / (p b t^b)`` for ``X / mu``.

    ``G(t/u)`` is a step function of ``u``: the atom at ``k`` contributes on
    ``u > mu t / k``, so the integral is a finite sum of power integrals.
    """
    ctx = _real.ctx
    a, b = to_mpf(alpha), to_mpf(beta)
    mu = to_mpf(mu_factor(d, alpha, beta))
    c = a - b  # exponent after integrating u^(a-b-1)
    for t in t_grid:
        tm = to_mpf(_num(t))
        if tm <= 0:
            raise DomainError("the integral lemma needs t > 0")
        s = mu * tm
        lhs = to_mpf(0)
        for k, w in d:
            if k <= s:
                continue
            lo = s / k
            piece = -ctx.log(lo) if c == 0 else (1 - ctx.power(lo, c)) / c
            lhs += to_mpf(w) * piece
        g = to_mpf(survival(d, _floor_or_exact(s)))
        rhs = g / (to_mpf(p) * b * ctx.power(tm, b))
        margin = rhs - lhs
        rep.record(("int", _num(t)), margin, ok=margin >= -to_mpf(tol))


def _floor_or_exact(s):
    # P[X > s] for integer support only depends on floor(s)
    return int(_real.ctx.floor(s))


def _mrl_lemma(d, alpha, beta, p, t_grid, tol, rep):
    a, b = _num(alpha), _num(beta)
    diff = b - a
    if diff not in (1, -1):
        raise BadParams("the mean-residual lemma needs beta - alpha = 1 or -1")
    ctx = _real.ctx
    mu = to_mpf(mu_factor(d, alpha, beta))
    for t in t_grid:
        tm = to_mpf(_num(t))
        if tm <= 0:
            raise DomainError("the mean-residual lemma needs t > 0")
        s = mu * tm
        g = survival(d, _floor_or_exact(s))
        if g == 0:
            rep.notes.append(f"mrl t={t}: P[X > mu t] = 0, lemma vacuous")
            continue
        bound = 1 / (to_mpf(p) * to_mpf(b) * ctx.power(tm, to_mpf(a)))
        above = [(k, to_mpf(w)) for k, w in d if k > s]
        gm = to_mpf(g)
        if diff == 1:
            lhs = sum(w * (k / mu - tm) for k, w in above) / gm
            margin = bound - lhs
        else:
            lhs = sum(w * (mu / k - 1 / tm) for k, w in above) / gm
            margin = lhs + bound
        rep.record(("mrl", _num(t)), margin, ok=margin >= -to_mpf(tol))


def _recexp_lemma(d, t_grid, tol, rep):
    ctx = _real.ctx
    for t in t_grid:
        t = _num(t)
        g_t = survival(d, t, strict=False)
        lhs = sum((w / survival(d, k, strict=False) for k, w in d if k < t), Fraction(0))
        if g_t == 0:
            rep.record(("recexp", t), ctx.inf)
            continue
        margin = -ctx.log(to_mpf(g_t)) - to_mpf(lhs)
        rep.record(("recexp", t), margin, ok=margin >= -to_mpf(tol))


def _recbnd_lemma(d, t_grid, tol, rep):
    ctx = _real.ctx
    for t in t_grid:
        t = _num(t)
        g = survival(d, t, strict=False)
        z = record_survival(d, t)
        if g == 0:
            rep.record(("recbnd", t), Fraction(0), ok=z == 0)
            continue
        gm = to_mpf(g)
        margin = gm * (1 - ctx.log(gm)) - to_mpf(z)
        rep.record(("recbnd", t), margin, ok=margin >= -to_mpf(tol))


def verify_tail_lemmas(kind: str, d: FiniteDist, alpha=1, beta=1, p=1, t_grid=None,
                       tol=BOUND_TOL) -> CheckReport:
    """Check one of ``int``, ``mrl``, ``recexp`` or ``recbnd`` on ``d``.

    ``int`` and ``mrl`` need ``X* <=_p X`` in the upper-tail order (certified
    here) and are evaluated for ``X / mu``, which has ``E (X/mu)^beta =
    alpha/beta``.  The record lemmas hold for every law; their default grid
    is the support of ``d``.
    """
    rep = CheckReport(f"tail_lemma_{kind}", params=dict(alpha=alpha, beta=beta, p=p), exact=False)
    if t_grid is None:
        t_grid = list(d.points)
    if kind in ("int", "mrl"):
        cert = _certify(d, alpha, beta, _num(p), "utail")
        rep.params["utail_pmax"] = cert.p_max
        if kind == "int":
            _int_lemma(d, alpha, beta, p, t_grid, tol, rep)
        else:
            _mrl_lemma(d, alpha, beta, p, t_grid, tol, rep)
    elif kind == "recexp":
        _recexp_lemma(d, t_grid, tol, rep)
    elif kind == "recbnd":
        _recbnd_lemma(d, t_grid, tol, rep)
    else:
        raise BadParams(f"unknown lemma {kind!r}")
    return rep


# ---------------------------------------------------------------------------
# sharpness fixtures


def capped_geometric(mu: int, n: int) -> FiniteDist:
    """Geometric(1/mu) on ``1..n`` with the remaining mass ``(1 - 1/mu)**n`` at ``n + mu``."""
    if mu < 2 or n < 0:
        raise BadParams("need integer mu >= 2 and n >= 0")
    p = Fraction(1, mu)
    q = 1 - p
    pairs = [(k, q ** (k - 1) * p) for k in range(1, n + 1)]
    pairs.append((n + mu, q**n))
    return FiniteDist.from_pairs(pairs)


@dataclass(frozen=True)
class AnalyticLaw:
    """A continuous law known through closed-form ``survival`` and ``cdf``."""

    name: str
    survival: Callable
    cdf: Callable
    mass: int = 1


@dataclass(frozen=True)
class ExpMixture:
    """``X`` = Exp(a) w.p. ``a(1-b)/(a-b)``, Exp(b) otherwise (rates), with ``b < 1 < a``.

    ``E X = 1`` and the equilibrium transform ``X*`` mixes the same two
    exponentials with weights ``(1-b)/(a-b)`` and ``(a-1)/(a-b)``.
    """

    a: object
    b: object

    def __post_init__(self):
        if not (0 < _num(self.b) < 1 < _num(self.a)):
            raise BadParams("need 0 < b < 1 < a")

    def _parts(self, star: bool):
        a, b = to_mpf(_num(self.a)), to_mpf(_num(self.b))
        if star:
            return a, b, (1 - b) / (a - b), (a - 1) / (a - b)
        return a, b, a * (1 - b) / (a - b), (a - 1) * b / (a - b)

    def _cdf(self, t, star):
        ctx = _real.ctx
        a, b, pa, pb = self._parts(star)
        t = to_mpf(t)
        if t <= 0:
            return to_mpf(0)
        return -(pa * ctx.expm1(-a * t) + pb * ctx.expm1(-b * t))

    def _surv(self, t, star):
        ctx = _real.ctx
        a, b, pa, pb = self._parts(star)
        t = to_mpf(t)
        if t <= 0:
            return to_mpf(1)
        return pa * ctx.exp(-a * t) + pb * ctx.exp(-b * t)

    @property
    def p_closed_form(self):
        a, b = to_mpf(_num(self.a)), to_mpf(_num(self.b))
        return 1 / (a + b - a * b)

    def law(self) -> AnalyticLaw:
        return AnalyticLaw("mixture", lambda t: self._surv(t, False), lambda t: self._cdf(t, False))

    def star(self) -> AnalyticLaw:
        return AnalyticLaw("mixture*", lambda t: self._surv(t, True), lambda t: self._cdf(t, True))


def _log_grid(lo_exp: int, hi_exp: int, per_decade: int) -> list:
    ctx = _real.ctx
    steps = (hi_exp - lo_exp) * per_decade
    return [ctx.power(10, to_mpf(lo_exp) + to_mpf(i) / per_decade) for i in range(steps + 1)]


def _check_capped(params: dict, rep: CheckReport):
    from .reliability import is_nbue

    mu = int(params.get("mu", 10))
    t = int(params.get("t", 2))
    if t < 2:
        raise BadParams("the capped fixture needs integer t >= 2")
    n = (t - 1) * mu
    d = capped_geometric(mu, n)
    rep.record("mean", Fraction(0), ok=d.mean == mu)
    if params.get("nbue", True):
        rep.record("nbue", Fraction(0), ok=is_nbue(d).verdict)
    tail = survival(d, mu * t, strict=False)
    closed = (1 - Fraction(1, mu)) ** ((t - 1) * mu)
    rep.record("tail_closed_form", tail - closed, ok=tail == closed)
    ctx = _real.ctx
    ratio = to_mpf(tail) / ctx.exp(1 - to_mpf(t))
    rep.params["tail"] = tail
    rep.params["ratio_to_e^(1-t)"] = ratio
    rep.record("below_e^(1-t)", 1 - ratio)
    rtol = params.get("rtol")
    if rtol is not None:
        dev = abs(ratio - 1)
        rep.record("ratio_within_rtol", to_mpf(_num(rtol)) - dev)


def _check_mixture(params: dict, grid, rep: CheckReport):
    fx = ExpMixture(params.get("a", 2), params.get("b", Fraction(1, 2)))
    x, xs = fx.law(), fx.star()
    if grid is None:
        grid = _log_grid(-10, 3, 20)
    ratios = [(t, xs.cdf(t) / x.cdf(t)) for t in grid if x.cdf(t) > 0]
    t_min, p_num = min(ratios, key=lambda r: r[1])
    p_cf = fx.p_closed_form
    rep.params.update(p_numeric=p_num, p_closed_form=p_cf, argmin_t=t_min)
    ptol = to_mpf(_num(params.get("ptol", Fraction(1, 10**6))))
    rep.record("ltail_p", ptol - abs(p_num - p_cf))
    # the lower bound t / p with the certified p holds on the grid
    for t in grid:
        margin = to_mpf(t) / p_cf - x.cdf(t)
        rep.record(("lower_bound", t), margin, ok=margin >= -to_mpf(BOUND_TOL))
    # small-t sharpness: P[X <= t] / ((a + b - ab) t) -> 1
    t0 = to_mpf(_num(params.get("t_small", Fraction(1, 10**4))))
    ratio = x.cdf(t0) / (t0 / p_cf)
    rep.params["small_t_ratio"] = ratio
    rtol = to_mpf(_num(params.get("rtol", Fraction(1, 100))))
    rep.record("small_t_expansion", rtol - abs(ratio - 1))
    # second order: (P[X <= t] - t/p) / t^2 stays bounded near zero
    quad = (x.cdf(t0) - t0 / p_cf) / (t0 * t0)
    rep.params["second_order_coefficient"] = quad


def analytic_fixture_checks(name: str, params: dict | None = None, grid=None) -> CheckReport:
    """``capped`` (params ``mu``, ``t``, optional ``rtol``) or ``mixture``
    (params ``a``, ``b``, ``ptol``, ``t_small``, ``rtol``)."""
    params = dict(params or {})
    rep = CheckReport(f"fixture_{name}", params=dict(params))
    if name == "capped":
        _check_capped(params, rep)
    elif name == "mixture":
        rep.exact = False
        _check_mixture(params, grid, rep)
    else:
        raise BadParams(f"unknown fixture {name!r}")
    return rep


def parse_grid(text: str) -> list:
    """``"a:b:step"`` (inclusive, exact decimals) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        a, b, step = (as_fraction(x) for x in text.split(":"))
        if step <= 0:
            raise BadParams("grid step must be positive")
        out = []
        x = a
        while x <= b:
            out.append(x)
            x += step
        return out
    return [as_fraction(x) for x in text.split(",") if x.strip()]
