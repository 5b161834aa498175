"""Distributional transforms: power and rising-factorial bias, discrete and
generalized equilibrium laws, and the record transform."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _real
from ._real import to_mpf
from .dist import (
    FiniteDist,
    _is_nonneg_int,
    _is_rational,
    as_fraction,
    convolve,
    convolve_power,
    mixture,
    moment,
    survival,
)
from .errors import BadParams, ZeroMass
from .report import CheckReport


def power_bias(d: FiniteDist, beta) -> FiniteDist:
    """Reweight ``d`` by ``k**beta``; exact for nonnegative integer ``beta``."""
    if _is_nonneg_int(beta):
        b = int(beta)
        raw = [(k, k**b * w) for k, w in d]
        total = sum(w for _, w in raw)
    else:
        b = to_mpf(beta)
        raw = [(k, _real.ctx.power(k, b) * to_mpf(w)) for k, w in d if k > 0]
        total = sum(w for _, w in raw)
    if total == 0:
        raise ZeroMass("E[X^beta] = 0")
    return FiniteDist.from_pairs(((k, w / total) for k, w in raw if w != 0))


def size_bias(d: FiniteDist) -> FiniteDist:
    return power_bias(d, 1)


def rising_factorial(k: int, r: int) -> int:
    """``k (k+1) ... (k+r-1)``."""
    out = 1
    for i in range(r):
        out *= k + i
    return out


def rising_factorial_moment(d: FiniteDist, r: int) -> Fraction:
    return sum((rising_factorial(k, r) * w for k, w in d), Fraction(0))


def rising_factorial_bias(d: FiniteDist, r: int) -> FiniteDist:
    """Reweight ``d`` by the rising factorial ``k^[r]``."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    raw = [(k, rising_factorial(k, r) * w) for k, w in d]
    total = sum(w for _, w in raw)
    if total == 0:
        raise ZeroMass("rising factorial mean is zero")
    return FiniteDist.from_pairs((k, w / total) for k, w in raw if w != 0)


def discrete_equilibrium(d: FiniteDist) -> FiniteDist:
    """``P[X^e = n] = P[X >= n] / E X`` for ``n >= 1``."""
    m = d.mean
    if m == 0:
        raise ZeroMass("E X = 0")
    return FiniteDist.from_pairs((n, survival(d, n, strict=False) / m) for n in range(1, d.max + 1))


@dataclass(frozen=True)
class GenEquilibrium:
    """The law of ``V_alpha * X^(beta)`` where ``V_alpha`` has density
    ``alpha x**(alpha-1)`` on ``[0, 1]``.

    Only the survival function is offered; it is exact when ``alpha`` is a
    positive integer, ``beta`` a nonnegative integer and ``t`` rational.
    """

    base: FiniteDist
    alpha: object
    beta: object
    biased: FiniteDist

    @property
    def max(self) -> int:
        return self.biased.max

    @property
    def exact(self) -> bool:
        return self.biased.exact and _is_nonneg_int(self.alpha) and int(self.alpha) > 0

    def survival(self, t, strict: bool = True):
        return gen_equib_survival(self, t, strict)

    def cdf(self, t):
        return 1 - gen_equib_survival(self, t)


def gen_equilibrium(d: FiniteDist, alpha, beta) -> GenEquilibrium:
    if not (alpha > 0 and beta > 0):
        raise BadParams("alpha and beta must be positive")
    if _is_rational(alpha):
        alpha = as_fraction(alpha)
        if alpha.denominator == 1:
            alpha = int(alpha)
    if _is_rational(beta):
        beta = as_fraction(beta)
        if beta.denominator == 1:
            beta = int(beta)
    return GenEquilibrium(d, alpha, beta, power_bias(d, beta))


def _kernel_exact(k: int, t: Fraction, a: int) -> Fraction:
    # P[V_a * k > t] for integer a
    if t <= 0:
        return Fraction(1)
    if t >= k:
        return Fraction(0)
    return 1 - (t / k) ** a


def gen_equib_survival(g: GenEquilibrium, t, strict: bool = True):
    """``P[X* > t] = sum_k q_k (1 - min(t/k, 1)**alpha)``; no atoms, so
    ``strict`` is accepted only for symmetry with :func:`survival`."""
    if g.exact and _is_rational(t):
        t = as_fraction(t)
        a = int(g.alpha)
        return sum((q * _kernel_exact(k, t, a) for k, q in g.biased if k > t), Fraction(0))
    return _gen_equib_survival_real(
        [to_mpf(k) for k in g.biased.points], [to_mpf(q) for q in g.biased.weights], g.alpha, t
    )


def _gen_equib_survival_real(points, weights, alpha, t):
    """Same closed form for arbitrary positive real atom locations."""
    t = to_mpf(t)
    a = to_mpf(alpha)
    if t <= 0:
        return sum(w for x, w in zip(points, weights) if x > 0)
    out = to_mpf(0)
    for x, w in zip(points, weights):
        if x > t:
            out += w * (1 - _real.ctx.power(t / x, a))
    return out


def record_survival(d: FiniteDist, t) -> Fraction:
    """``P[Z(X) >= t] = G(t) (1 + E[1{X < t} / G(X)])`` with ``G(t) = P[X >= t]``."""
    g_t = survival(d, t, strict=False)
    acc = Fraction(0)
    for k, w in d:
        if k >= t:
            break
        acc += w / survival(d, k, strict=False)
    return g_t * (1 + acc)


# ---------------------------------------------------------------------------
# identity checks


def _check_scaling(d, alpha, beta, gamma, t_grid) -> CheckReport:
    rep = CheckReport("scaling", params=dict(alpha=alpha, beta=beta, gamma=gamma), exact=False)
    g = gen_equilibrium(d, alpha, beta)
    gam = to_mpf(gamma)
    # X**gamma keeps the power-biased weights k**beta p_k
    pts = [_real.ctx.power(k, gam) for k in g.biased.points]
    wts = [to_mpf(q) for q in g.biased.weights]
    a2 = to_mpf(alpha) / gam
    for t in t_grid:
        lhs = to_mpf(gen_equib_survival(g, t))
        rhs = _gen_equib_survival_real(pts, wts, a2, _real.ctx.power(to_mpf(t), gam))
        diff = abs(lhs - rhs)
        rep.record(t, 1e-25 - diff)
    return rep


def _check_sum(d, n) -> CheckReport:
    rep = CheckReport("equilibrium_of_sum", params=dict(n=n))
    lhs = discrete_equilibrium(convolve_power(d, n))
    de = discrete_equilibrium(d)
    parts = [(Fraction(1, n), convolve(convolve_power(d, i - 1), de)) for i in range(1, n + 1)]
    rhs = mixture(parts)
    rep.record("pmf", Fraction(0), ok=lhs == rhs)
    return rep


def _check_mixture(weights, parts) -> CheckReport:
    rep = CheckReport("equilibrium_of_mixture", params=dict(weights=list(weights)))
    x = mixture(list(zip(weights, parts)))
    lhs = discrete_equilibrium(x)
    m = x.mean
    gov = [(w * p.mean / m, discrete_equilibrium(p)) for w, p in zip(weights, parts) if p.mean > 0]
    rhs = mixture(gov)
    rep.record("pmf", Fraction(0), ok=lhs == rhs)
    return rep


def power_to_factorial_p(d: FiniteDist, l: int) -> Fraction:
    """``E X^(l+1) / E[X (X+1) ... (X+l)]``."""
    return moment(d, l + 1) / rising_factorial_moment(d, l + 1)


def _check_power_to_factorial(d, l) -> CheckReport:
    p = power_to_factorial_p(d, l)
    rep = CheckReport("power_to_factorial", params=dict(l=l, p=p))
    x = power_bias(d, l + 1)
    y = rising_factorial_bias(d, l + 1)
    for t in range(0, d.max + 1):
        sx = survival(x, t)
        sy = survival(y, t)
        rep.record(t, sy / p - sx)
    return rep


def verify_transform_identities(kind: str, d: FiniteDist | None = None, **params) -> CheckReport:
    """Check one transform identity.

    ``kind`` is ``"scaling"`` (params ``alpha, beta, gamma, t_grid``),
    ``"sum"`` (``n``), ``"mixture"`` (``weights, parts``; ``d`` unused) or
    ``"power_to_factorial"`` (``l``).
    """
    try:
        if kind == "scaling":
            return _check_scaling(d, params["alpha"], params["beta"], params["gamma"], params["t_grid"])
        if kind == "sum":
            return _check_sum(d, int(params["n"]))
        if kind == "mixture":
            return _check_mixture([as_fraction(w) for w in params["weights"]], params["parts"])
        if kind == "power_to_factorial":
            return _check_power_to_factorial(d, int(params["l"]))
    except KeyError as exc:
        raise BadParams(f"missing parameter {exc}") from exc
    raise BadParams(f"unknown identity {kind!r}")


__all__ = [
    "power_bias",
    "size_bias",
    "rising_factorial",
    "rising_factorial_moment",
    "rising_factorial_bias",
    "discrete_equilibrium",
    "GenEquilibrium",
    "gen_equilibrium",
    "gen_equib_survival",
    "record_survival",
    "power_to_factorial_p",
    "verify_transform_identities",
]
