"""Verdict objects shared by every verification routine."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

from ._real import MPF, ctx


def jsonable(x: Any):
    """Recursively turn Fractions, mpf values and tuples into JSON-ready data.

    Fractions become ``"n/d"`` strings so exact values survive a round trip.
    """
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, MPF):
        return ctx.nstr(x, 30)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "__dataclass_fields__"):
        return jsonable(asdict(x))
    if hasattr(x, "points") and hasattr(x, "weights"):
        from .dist import dist_to_json

        return dist_to_json(x)
    return str(x)


def _prefixed(prefix: str, label):
    if not prefix:
        return label
    if isinstance(label, tuple):
        return (prefix,) + label
    return f"{prefix}{label}"


@dataclass
class CheckReport:
    """Outcome of one verification run.

    ``margins`` maps a grid label to ``bound - observed`` (nonnegative when the
    inequality holds); ``witnesses`` lists the grid points where it failed.
    """

    name: str
    holds: bool = True
    params: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    margins: list = field(default_factory=list)
    exact: bool = True
    notes: list = field(default_factory=list)
    #: optional rows for tabular (CSV) output
    table: list = field(default_factory=list)

    def record(self, label, margin, ok: bool | None = None) -> bool:
        """Add one grid point; ``ok`` defaults to ``margin >= 0``."""
        if ok is None:
            ok = margin >= 0
        if isinstance(margin, MPF) or isinstance(margin, float):
            self.exact = False
        self.margins.append((label, margin))
        if not ok:
            self.holds = False
            self.witnesses.append(label)
        return ok

    def fail(self, witness, note: str | None = None):
        self.holds = False
        self.witnesses.append(witness)
        if note:
            self.notes.append(note)

    def merge(self, other: "CheckReport", prefix: str = "") -> "CheckReport":
        for label, m in other.margins:
            self.margins.append((_prefixed(prefix, label), m))
        if not other.holds:
            self.holds = False
            self.witnesses.extend(_prefixed(prefix, w) for w in other.witnesses)
        self.exact = self.exact and other.exact
        self.notes.extend(other.notes)
        return self

    @property
    def worst_margin(self):
        if not self.margins:
            return None
        vals = [m for _, m in self.margins]
        if any(isinstance(m, (MPF, float)) for m in vals):
            return min(vals, key=lambda m: m if isinstance(m, (MPF, float)) else ctx.mpf(m.numerator) / m.denominator)
        return min(vals)

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "holds": self.holds,
            "exact": self.exact,
            "params": jsonable(self.params),
            "witnesses": jsonable(self.witnesses),
            "worst_margin": jsonable(self.worst_margin),
            "margins": jsonable(self.margins),
            "notes": list(self.notes),
            **({"table": jsonable(self.table)} if self.table else {}),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)
