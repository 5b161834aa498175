"""The usual stochastic order, its two p-relaxations, and couplings.

Survival functions handled here are either right-continuous step functions
jumping only at integers (:class:`~eqk.dist.FiniteDist`) or continuous
(:class:`~eqk.transforms.GenEquilibrium`, analytic laws).  For such a pair the
extremal ratio over all real ``t`` is attained at an integer ``k`` or as the
left limit at ``k + 1``, so scanning those two candidates per integer is an
exact reduction of the infimum.  Laws of any other kind need an explicit grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._real import MPF, REAL_TOL
from .dist import FiniteDist, SubDist, as_fraction, survival
from .errors import NotDominated
from .transforms import GenEquilibrium

__all__ = [
    "OrderReport",
    "dominates",
    "utail_pmax",
    "ltail_pmax",
    "order_holds",
    "monotone_coupling",
    "relaxed_coupling",
    "coupling_marginals",
]


@dataclass(frozen=True)
class OrderReport:
    """Result of an order comparison.

    ``p_max`` is the largest ``p`` for which the relaxed order holds (clamped
    to ``[0, 1]``); ``raw_inf`` is the unclamped infimum of the ratio.  The
    infimum is attained at ``witness_t`` itself or, when ``witness_left`` is
    set, as ``t`` increases to ``witness_t``.
    """

    holds: bool
    p_max: object
    raw_inf: object
    witness_t: object
    witness_left: bool = False

    @property
    def margin(self):
        return self.raw_inf

    def to_dict(self) -> dict:
        from .report import jsonable

        return {
            "holds": self.holds,
            "p_max": jsonable(self.p_max),
            "raw_inf": jsonable(self.raw_inf),
            "witness_t": jsonable(self.witness_t),
            "witness_left": self.witness_left,
        }


def _is_step(x) -> bool:
    return isinstance(x, (FiniteDist, SubDist))


def _surv(x, t):
    if _is_step(x):
        return survival(x, t, strict=True)
    return x.survival(t)


def _surv_left(x, t):
    """``lim_{s -> t-} P[X > s]``."""
    if _is_step(x):
        return survival(x, t, strict=False)
    return x.survival(t)


def _upper(x) -> int:
    return max(x.max, 0) if hasattr(x, "max") else 0


def _candidates(x, y, grid=None):
    """Yield ``(t, left_limit, S_x, S_y)`` over the reduced threshold set."""
    if grid is not None:
        for t in grid:
            yield t, False, _surv(x, t), _surv(y, t)
        return
    if not all(_is_step(z) or isinstance(z, GenEquilibrium) for z in (x, y)):
        raise TypeError("laws without integer structure need an explicit grid")
    yield -1, False, _surv(x, -1), _surv(y, -1)
    top = max(_upper(x), _upper(y))
    for k in range(0, top + 1):
        yield k, True, _surv_left(x, k), _surv_left(y, k)
        yield k, False, _surv(x, k), _surv(y, k)


def _clamp(v):
    if v > 1:
        return Fraction(1)
    if v < 0:
        return Fraction(0)
    return v


def _scan(pairs, num_den):
    best = None
    wit = (None, False)
    for t, left, a, b in pairs:
        num, den = num_den(a, b)
        if den == 0:
            continue  # 0/0 or vacuous constraint
        r = num / den
        if best is None or r < best:
            best, wit = r, (t, left)
    return best, wit


def utail_pmax(x, y, grid=None) -> OrderReport:
    """Sup of ``p`` with ``P[X > t] <= P[Y > t] / p`` for all ``t``."""
    best, (t, left) = _scan(_candidates(x, y, grid), lambda sx, sy: (sy, sx))
    if best is None:
        return OrderReport(True, Fraction(1), None, None)
    p = _clamp(best)
    return OrderReport(_ge_one(best), p, best, t, left)


def ltail_pmax(x, y, grid=None) -> OrderReport:
    """Sup of ``p`` with ``P[X <= t] >= p P[Y <= t]`` for all ``t``."""
    mx = getattr(x, "mass", 1)
    my = getattr(y, "mass", 1)
    best, (t, left) = _scan(_candidates(x, y, grid), lambda sx, sy: (mx - sx, my - sy))
    if best is None:
        return OrderReport(True, Fraction(1), None, None)
    p = _clamp(best)
    return OrderReport(_ge_one(best), p, best, t, left)


def _ge_one(r) -> bool:
    if isinstance(r, MPF) or isinstance(r, float):
        return r >= 1 - REAL_TOL
    return r >= 1


def dominates(x, y, grid=None) -> OrderReport:
    """Usual stochastic order ``X <= Y``: ``P[X > t] <= P[Y > t]`` for all ``t``."""
    return utail_pmax(x, y, grid)


def order_holds(x, y, p, kind: str = "utail", grid=None) -> bool:
    p = as_fraction(p) if not isinstance(p, MPF) else p
    rep = utail_pmax(x, y, grid) if kind == "utail" else ltail_pmax(x, y, grid)
    if rep.raw_inf is None:
        return True
    if isinstance(rep.raw_inf, MPF):
        return rep.raw_inf >= p - REAL_TOL
    return rep.raw_inf >= p


# ---------------------------------------------------------------------------
# couplings

_NEG_INF = float("-inf")
_POS_INF = float("inf")


def _quantile_coupling(xs, ys) -> dict:
    """Comonotone coupling of two atom lists sorted by value (shared uniform)."""
    out: dict = {}
    i = j = 0
    rx = xs[0][1]
    ry = ys[0][1]
    while i < len(xs) and j < len(ys):
        m = min(rx, ry)
        if m > 0:
            key = (xs[i][0], ys[j][0])
            out[key] = out.get(key, 0) + m
        rx -= m
        ry -= m
        if rx == 0:
            i += 1
            if i < len(xs):
                rx = xs[i][1]
        if ry == 0:
            j += 1
            if j < len(ys):
                ry = ys[j][1]
    return out


def monotone_coupling(x: FiniteDist, y: FiniteDist) -> dict:
    """Joint pmf ``{(i, j): mass}`` with the given marginals and no mass on ``i > j``."""
    if not dominates(x, y).holds:
        raise NotDominated("x is not stochastically dominated by y")
    return _quantile_coupling(list(x), list(y))


def relaxed_coupling(x: FiniteDist, y: FiniteDist, p, kind: str = "utail") -> dict:
    """Coupling realising a relaxed order.

    For ``kind="utail"`` the result satisfies ``P[X <= Y | X] >= p``; it is
    built by coupling ``X'`` (equal to ``X`` with probability ``p``, else
    ``-inf``) monotonically below ``Y`` and resampling ``X`` independently on
    the ``-inf`` branch.  ``kind="ltail"`` is the mirror image, with ``Y'``
    sent to ``+inf`` and ``P[X <= Y | Y] >= p``.
    """
    p = as_fraction(p)
    if not order_holds(x, y, p, kind):
        raise NotDominated(f"{kind} order fails at p={p}")
    out: dict = {}
    if kind == "utail":
        xs = [(_NEG_INF, 1 - p)] if p < 1 else []
        xs += [(k, p * w) for k, w in x]
        base = _quantile_coupling(xs, list(y))
        for (i, j), m in base.items():
            if i == _NEG_INF:
                for k, w in x:
                    out[(k, j)] = out.get((k, j), 0) + m * w
            else:
                out[(i, j)] = out.get((i, j), 0) + m
    elif kind == "ltail":
        ys = [(k, p * w) for k, w in y]
        ys += [(_POS_INF, 1 - p)] if p < 1 else []
        base = _quantile_coupling(list(x), ys)
        for (i, j), m in base.items():
            if j == _POS_INF:
                for k, w in y:
                    out[(i, k)] = out.get((i, k), 0) + m * w
            else:
                out[(i, j)] = out.get((i, j), 0) + m
    else:
        raise ValueError(f"unknown order kind {kind!r}")
    return {key: m for key, m in out.items() if m}


def coupling_marginals(joint: dict) -> tuple[FiniteDist, FiniteDist]:
    mx: dict = {}
    my: dict = {}
    for (i, j), m in joint.items():
        mx[i] = mx.get(i, 0) + m
        my[j] = my.get(j, 0) + m
    return FiniteDist.from_dict(mx), FiniteDist.from_dict(my)
