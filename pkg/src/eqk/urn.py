"""Exact urn laws ``P_n^l(b, w)`` and checks of their structural lemmas.

One recurrence drives everything.  With ``q_n(k) = P[N_n = k]`` and ``B_n``
balls in the urn before draw ``n + 1``::

    q_{n+1}(k) = (k - 1)/B_n * q_n(k - 1) + (1 - k/B_n) * q_n(k)

Rows are kept as integer numerators ``a_n(k)`` over the common denominator
``D_n = B_0 B_1 ... B_{n-1}``, so a row costs two small-by-big integer
products per cell and every lemma reduces to integer comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from . import _real
from ._real import to_mpf
from .dist import FiniteDist
from .errors import BadSchedule, BudgetExceeded
from .orders import dominates
from .report import CheckReport
from .transforms import gen_equilibrium, power_bias, rising_factorial, rising_factorial_bias

__all__ = [
    "UrnSpec",
    "urn_rows",
    "urn_pmf",
    "polya_pmf",
    "rf_moment",
    "rf_moment_closed_form",
    "second_moment",
    "moment_tail_bound",
    "verify_urn_lemmas",
    "grid_specs",
    "EXACT_N_BUDGET",
]

#: Largest number of draws for which full exact pmfs are produced.
EXACT_N_BUDGET = 2000


@dataclass(frozen=True)
class UrnSpec:
    """Urn with ``b`` black and ``w`` white balls, run for ``n`` draws.

    Either ``l`` (one extra black ball after every ``l``-th draw) or an
    explicit ``schedule`` ``(B_0, B_1, ...)`` of total ball counts is used;
    ``schedule`` wins when given and needs at least ``n`` entries.
    """

    b: int
    w: int
    n: int
    l: int = 1
    schedule: tuple | None = None

    def __post_init__(self):
        if self.w < 1:
            raise BadSchedule("need at least one white ball")
        if self.b < 0 or self.n < 0:
            raise BadSchedule("b and n must be nonnegative")
        if self.schedule is None:
            if self.l < 1:
                raise BadSchedule("period l must be at least 1")
            return
        s = tuple(int(x) for x in self.schedule)
        object.__setattr__(self, "schedule", s)
        if len(s) < self.n:
            raise BadSchedule(f"schedule has {len(s)} entries, need {self.n}")
        if s and s[0] != self.b + self.w:
            raise BadSchedule(f"B_0 = {s[0]} but b + w = {self.b + self.w}")
        if any(y < x + 1 for x, y in zip(s, s[1:])):
            raise BadSchedule("ball counts must increase by at least one per draw")

    def balls(self, m: int) -> int:
        """``B_m``, the number of balls before draw ``m + 1``."""
        if self.schedule is not None:
            return self.schedule[m]
        return self.b + self.w + m + m // self.l

    def with_n(self, n: int) -> "UrnSpec":
        return UrnSpec(self.b, self.w, n, self.l, self.schedule)

    def with_w(self, w: int) -> "UrnSpec":
        if self.schedule is not None:
            raise BadSchedule("shifting w is only defined for periodic schedules")
        return UrnSpec(self.b, w, self.n, self.l)


def urn_rows(spec: UrnSpec) -> Iterator[tuple[int, list[int], int]]:
    """Yield ``(m, a_m, D_m)`` for ``m = 0 .. n`` with ``q_m(w + i) = a_m[i] / D_m``."""
    w = spec.w
    row = [1]
    den = 1
    yield 0, row, den
    for m in range(spec.n):
        B = spec.balls(m)
        if B <= 0:
            raise BadSchedule(f"B_{m} = {B} is not positive")
        nxt = [0] * (len(row) + 1)
        for i, a in enumerate(row):
            if a:
                k = w + i
                nxt[i] += (B - k) * a
                nxt[i + 1] += k * a
        row = nxt
        den *= B
        yield m + 1, row, den


def _last_row(spec: UrnSpec):
    for _, row, den in urn_rows(spec):
        pass
    return row, den


def urn_pmf(spec: UrnSpec) -> FiniteDist:
    """Exact law of the white-ball count after ``spec.n`` draws."""
    if spec.n > EXACT_N_BUDGET:
        raise BudgetExceeded(f"exact pmf limited to n <= {EXACT_N_BUDGET}")
    row, den = _last_row(spec)
    return FiniteDist.from_pairs((spec.w + i, Fraction(a, den)) for i, a in enumerate(row) if a)


def polya_pmf(w: int, n: int) -> FiniteDist:
    """Regular Polya urn from one black and ``w`` white balls, no extra black balls."""
    return urn_pmf(UrnSpec(1, w, n, schedule=tuple(1 + w + m for m in range(n))))


# ---------------------------------------------------------------------------
# moments


def rf_moment(spec: UrnSpec, r: int) -> Fraction:
    """``E N_n^[r] = w^[r] * prod_{m<n} (1 + r/B_m)`` for any schedule.

    Conditioning on ``N_m = k`` multiplies ``k^[r]`` by exactly
    ``1 + r/B_m``, which gives the product form.
    """
    out = Fraction(rising_factorial(spec.w, r))
    for m in range(spec.n):
        B = spec.balls(m)
        out *= Fraction(B + r, B)
    return out


def rf_moment_closed_form(n: int, m: int) -> Fraction:
    """``E N_n(1,2)^[2m]`` for ``l = 1``: ``2^[2m] prod_{i<m} (2n+2i+3)/(2i+3)``."""
    out = Fraction(rising_factorial(2, 2 * m))
    for i in range(m):
        out *= Fraction(2 * n + 2 * i + 3, 2 * i + 3)
    return out


def second_moment(spec: UrnSpec) -> Fraction:
    """``E N_n^2 = E N^[2] - E N``."""
    return rf_moment(spec, 2) - rf_moment(spec, 1)


def moment_tail_bound(n: int, t, m_range=range(1, 61)):
    """Best Markov bound ``E N^[2m] / (gamma_n t)^[2m]`` over ``m`` for ``N = N_n(1, 2)``, ``l = 1``.

    ``gamma_n**2 = E N_n(1,2)**2`` is exact.  Returns ``(best_m, bound, all)``
    where ``all`` maps each ``m`` to its bound.
    """
    ctx = _real.ctx
    spec = UrnSpec(1, 2, n, 1)
    gamma = ctx.sqrt(to_mpf(second_moment(spec)))
    x = gamma * to_mpf(t)
    values = {}
    # running products: numerator via the closed form, denominator x^[2m]
    den = to_mpf(1)
    j = 0
    for m in sorted(m_range):
        while j < 2 * m:
            den *= x + j
            j += 1
        values[m] = to_mpf(rf_moment_closed_form(n, m)) / den
    best = min(values, key=lambda m: values[m])
    return best, values[best], values


# ---------------------------------------------------------------------------
# lemma checks


def _q(row: list[int], w: int, k: int) -> int:
    i = k - w
    return row[i] if 0 <= i < len(row) else 0


def _check_lc(spec: UrnSpec, rep: CheckReport):
    w = spec.w
    for m, row, den in urn_rows(spec):
        worst = None
        for k in range(w - 1, w + m + 2):
            a0, a1, a2 = _q(row, w, k - 1), _q(row, w, k), _q(row, w, k + 1)
            slack = a1 * a1 - a0 * a2
            if slack < 0:
                rep.fail((spec.b, w, spec.l, m, k))
            worst = slack if worst is None else min(worst, slack)
        rep.margins.append(((spec.b, w, spec.l, m), Fraction(worst, den * den)))


def _check_tech(spec: UrnSpec, rep: CheckReport):
    w = spec.w
    for m, row, den in urn_rows(spec):
        if spec.schedule is not None and m >= len(spec.schedule):
            break
        B = spec.balls(m)
        worst = None
        for k in range(w - 1, w + m + 2):
            a0, a1, a2 = _q(row, w, k - 1), _q(row, w, k), _q(row, w, k + 1)
            slack = (B - k) * a1 * a1 - (B - k - 1) * a0 * a2 - a0 * a1
            if slack < 0:
                rep.fail((spec.b, w, spec.l, m, k))
            worst = slack if worst is None else min(worst, slack)
        rep.margins.append(((spec.b, w, spec.l, m), Fraction(worst, den * den)))


def _check_variant(spec: UrnSpec, rep: CheckReport):
    w = spec.w
    prev = None
    for m, row, den in urn_rows(spec):
        if prev is not None:
            # q_{m-1}(k-1) q_m(k+1) <= q_{m-1}(k) q_m(k); both sides over D_{m-1} D_m
            worst = None
            for k in range(w - 1, w + m + 1):
                slack = _q(prev, w, k) * _q(row, w, k) - _q(prev, w, k - 1) * _q(row, w, k + 1)
                if slack < 0:
                    rep.fail((spec.b, w, spec.l, m - 1, k))
                worst = slack if worst is None else min(worst, slack)
            rep.margins.append(((spec.b, w, spec.l, m - 1), Fraction(worst, prev_den * den)))
        prev, prev_den = row, den


def _check_unfac(spec: UrnSpec, rep: CheckReport):
    """``N_{n-l}^[l+1] + l`` dominates ``N_n^(l+1)``, by likelihood ratio and directly."""
    l, n = spec.l, spec.n
    if not 1 <= l <= n:
        return
    big = rising_factorial_bias(urn_pmf(spec.with_n(n - l)), l + 1).shift(l)
    small = power_bias(urn_pmf(spec), l + 1)
    key = (spec.b, spec.w, l, n)
    order = dominates(small, big)
    rep.record(key, order.raw_inf - 1 if order.raw_inf is not None else Fraction(0), ok=order.holds)
    # likelihood ratio P[big = k] / P[small = k] nondecreasing on the union support
    prev = None
    for k in range(spec.w, spec.w + n + 1):
        num, den = big.pmf(k), small.pmf(k)
        if num == 0 and den == 0:
            continue
        r = math.inf if den == 0 else num / den
        if prev is not None and r < prev:
            rep.fail(key + (k,), note=f"likelihood ratio decreases at k={k}")
            break
        prev = r


def _check_ineq(spec: UrnSpec, rep: CheckReport):
    d = urn_pmf(spec)
    order = dominates(gen_equilibrium(d, spec.w, spec.l + 1), d)
    key = (spec.b, spec.w, spec.l, spec.n)
    rep.record(key, order.raw_inf - 1 if order.raw_inf is not None else Fraction(0), ok=order.holds)


_KINDS = {
    "lc": _check_lc,
    "tech": _check_tech,
    "variant": _check_variant,
    "unfac": _check_unfac,
    "ineq": _check_ineq,
}


def verify_urn_lemmas(kind: str, specs, max_n: int = 500) -> CheckReport:
    """Run one lemma check over an iterable of :class:`UrnSpec`.

    ``lc``, ``tech`` and ``variant`` walk every row up to ``spec.n``, so one
    spec per ``(b, w, l)`` covers all smaller ``n``.  ``unfac`` and ``ineq``
    are checked at ``spec.n`` only.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown urn check {kind!r}; choose from {sorted(_KINDS)}")
    rep = CheckReport(f"urn_{kind}")
    specs = list(specs)
    rep.params["specs"] = len(specs)
    for spec in specs:
        if spec.n > max_n:
            raise BudgetExceeded(f"n = {spec.n} exceeds the check budget {max_n}")
        _KINDS[kind](spec, rep)
    return rep


def grid_specs(bs, ws, ls, ns) -> list[UrnSpec]:
    return [UrnSpec(b, w, n, l) for b in bs for w in ws for l in ls for n in ns]
