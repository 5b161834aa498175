"""Log-concave, D-IFR, NBUE and NBUEZT classes of integer distributions.

Every predicate returns a :class:`ClassReport`.  A failed verdict always
carries the first index at which the defining inequality breaks, so the caller
can re-evaluate it by hand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dist import FiniteDist, mrl, survival, zero_truncate
from .errors import SupportAtZero
from .orders import dominates
from .transforms import discrete_equilibrium

__all__ = [
    "ClassReport",
    "hazard",
    "is_log_concave",
    "is_difr",
    "is_nbue",
    "is_nbuezt",
    "nbue_margins",
    "residual_law",
    "residual_laws_decreasing",
    "classify",
]


@dataclass(frozen=True)
class ClassReport:
    """Membership verdict for one class.

    ``witness`` is the smallest index where the definition fails (``None``
    when ``verdict`` holds); ``hazard`` is attached by the D-IFR test.
    """

    name: str
    verdict: bool
    witness: int | None = None
    hazard: tuple | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.verdict

    def to_dict(self) -> dict:
        from .report import jsonable

        out = {"class": self.name, "verdict": self.verdict, "witness": self.witness}
        if self.hazard is not None:
            out["hazard"] = jsonable(list(self.hazard))
        if self.details:
            out["details"] = jsonable(self.details)
        return out


def _require_positive_support(d, what: str):
    if d.points[0] == 0:
        raise SupportAtZero(f"{what} needs support in {{1, 2, ...}}; P[X=0] = {d.weights[0]}")


def hazard(d: FiniteDist) -> tuple:
    """``P[X = k | X >= k]`` for ``k = 1 .. max``."""
    return tuple(d.pmf(k) / survival(d, k, strict=False) for k in range(1, d.max + 1))


def is_log_concave(d: FiniteDist) -> ClassReport:
    """``t_k**2 >= t_{k-1} t_{k+1}`` on ``0..max`` and no internal zeros."""
    t = d.dense()
    lo, hi = d.points[0], d.points[-1]
    for k in range(lo, hi + 1):
        if t[k] == 0:
            return ClassReport("log_concave", False, k, details={"reason": "internal zero"})
    for k in range(1, len(t) - 1):
        if t[k] * t[k] < t[k - 1] * t[k + 1]:
            return ClassReport("log_concave", False, k)
    return ClassReport("log_concave", True)


def is_difr(d: FiniteDist) -> ClassReport:
    """Hazard nondecreasing on ``k >= 1``; ``witness`` is the first ``k`` with ``h(k) < h(k-1)``."""
    _require_positive_support(d, "D-IFR")
    h = hazard(d)
    for i in range(1, len(h)):
        if h[i] < h[i - 1]:
            return ClassReport("difr", False, i + 1, hazard=h)
    return ClassReport("difr", True, hazard=h)


def nbue_margins(d) -> list:
    """``E X * P[X > k] - E[(X - k)^+]`` for ``k = 0 .. max``.

    Nonnegative everywhere exactly when ``d`` is NBUE.  Dividing by
    ``E X`` gives ``P[X > k] - P[X^e > k]``, so this single list serves both
    characterizations.
    """
    m = d.mean
    out = []
    for k in range(0, d.max + 1):
        tail = survival(d, k)
        excess = mrl(d, k) * tail
        out.append(m * tail - excess)
    return out


def is_nbue(d: FiniteDist) -> ClassReport:
    """NBUE via ``E[X - k | X > k] <= E X`` for ``k >= 1`` and, independently,
    via ``X^e <= X`` in the usual order.  The two routes must agree."""
    _require_positive_support(d, "NBUE")
    m = d.mean
    witness = None
    for k in range(1, d.max + 1):
        if survival(d, k) == 0:
            break
        if mrl(d, k) > m:
            witness = k
            break
    by_mrl = witness is None
    eq = dominates(discrete_equilibrium(d), d)
    if eq.holds != by_mrl:  # pragma: no cover - would contradict an exact identity
        raise AssertionError(f"NBUE routes disagree: mrl={by_mrl}, order={eq.holds}")
    return ClassReport("nbue", by_mrl, witness, details={"equilibrium_pmax": eq.p_max})


def is_nbuezt(d: FiniteDist) -> ClassReport:
    """NBUE of the zero-truncated law ``[X | X > 0]``."""
    rep = is_nbue(zero_truncate(d))
    return ClassReport("nbuezt", rep.verdict, rep.witness, details=rep.details)


def residual_law(d: FiniteDist, k: int) -> FiniteDist:
    """``[X - k | X > k]``."""
    tail = survival(d, k)
    return FiniteDist.from_pairs((j - k, w / tail) for j, w in d if j > k)


def residual_laws_decreasing(d: FiniteDist) -> ClassReport:
    """Whether ``[X - k | X > k]`` is stochastically nonincreasing in ``k``.

    Equivalent to D-IFR for laws on the positive integers; computed here
    without reference to the hazard so the equivalence can be tested.
    """
    _require_positive_support(d, "residual-law test")
    prev = residual_law(d, 0)
    for k in range(1, d.max):
        cur = residual_law(d, k)
        if not dominates(cur, prev).holds:
            return ClassReport("residual_decreasing", False, k)
        prev = cur
    return ClassReport("residual_decreasing", True)


def classify(d: FiniteDist) -> dict:
    """All four verdicts, skipping (with a reason) those undefined for ``d``."""
    out: dict = {"log_concave": is_log_concave(d).to_dict()}
    for name, fn in (("difr", is_difr), ("nbue", is_nbue)):
        try:
            out[name] = fn(d).to_dict()
        except SupportAtZero as exc:
            out[name] = {"class": name, "verdict": None, "error": str(exc)}
    out["nbuezt"] = is_nbuezt(d).to_dict()
    if out["difr"].get("hazard") is None:
        out["hazard"] = [str(h) for h in hazard(zero_truncate(d))] if d.points[0] == 0 else None
    else:
        out["hazard"] = out["difr"]["hazard"]
    return out
