"""Finitely supported distributions on the nonnegative integers.

Weights are :class:`fractions.Fraction` throughout; the only exception is a
distribution produced by a non-integer power bias, whose weights are
high-precision ``mpf`` values and which reports ``exact == False``.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from numbers import Rational
from typing import Iterable, Mapping

from . import _real
from ._real import MPF, REAL_TOL, to_mpf
from .errors import AllMassAtZero, BadWeights, InvalidDistribution, ZeroMass

__all__ = [
    "FiniteDist",
    "SubDist",
    "as_fraction",
    "survival",
    "cdf",
    "moment",
    "mu_factor",
    "convolve",
    "convolve_power",
    "mixture",
    "thin",
    "zero_truncate",
    "compound",
    "mrl",
    "dist_to_json",
    "dist_from_json",
    "load_dist",
]


def as_fraction(x) -> Fraction:
    """Exact conversion of ints, Fractions, floats and decimal strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact fraction")


def _is_rational(x) -> bool:
    return isinstance(x, (int, Rational)) and not isinstance(x, bool)


class _Atoms:
    """Shared read-only behaviour of full and sub-probability atom lists."""

    points: tuple
    weights: tuple

    def _validate_atoms(self):
        pts = self.points
        if len(pts) != len(self.weights):
            raise InvalidDistribution("points and weights differ in length")
        for k in pts:
            if not isinstance(k, int) or isinstance(k, bool) or k < 0:
                raise InvalidDistribution(f"support point {k!r} is not a nonnegative integer")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise InvalidDistribution("support points must be strictly increasing")
        if any(not w > 0 for w in self.weights):
            raise InvalidDistribution("weights must be strictly positive")

    @property
    def exact(self) -> bool:
        return all(isinstance(w, Fraction) for w in self.weights)

    @property
    def min(self) -> int:
        return self.points[0]

    @property
    def max(self) -> int:
        return self.points[-1]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(zip(self.points, self.weights))

    def pmf(self, k):
        i = bisect.bisect_left(self.points, k)
        if i < len(self.points) and self.points[i] == k:
            return self.weights[i]
        return Fraction(0)

    def as_dict(self) -> dict:
        return dict(zip(self.points, self.weights))

    def dense(self) -> list:
        """Weights on ``0..max`` as a list, zeros included."""
        out = [Fraction(0)] * (self.max + 1)
        for k, w in zip(self.points, self.weights):
            out[k] = w
        return out

    @cached_property
    def _tails(self) -> tuple:
        # _tails[i] = sum of weights[i:], with a trailing zero
        acc = Fraction(0) if self.exact else to_mpf(0)
        out = [acc]
        for w in reversed(self.weights):
            acc = acc + w
            out.append(acc)
        out.reverse()
        return tuple(out)

    @cached_property
    def _first_moment_tails(self) -> tuple:
        acc = Fraction(0) if self.exact else to_mpf(0)
        out = [acc]
        for k, w in zip(reversed(self.points), reversed(self.weights)):
            acc = acc + k * w
            out.append(acc)
        out.reverse()
        return tuple(out)

    @property
    def mass(self):
        return self._tails[0]

    @property
    def mean(self):
        """First moment (of the sub-probability measure, for a :class:`SubDist`)."""
        return self._first_moment_tails[0]

    def __repr__(self):
        body = ", ".join(f"{k}: {w}" for k, w in zip(self.points, self.weights))
        return f"{type(self).__name__}({{{body}}})"


@dataclass(frozen=True, repr=False)
class FiniteDist(_Atoms):
    """A probability distribution on finitely many nonnegative integers.

    Build instances with :meth:`from_dict`, :meth:`from_pairs`,
    :meth:`from_dense` or :meth:`point`; the raw constructor expects canonical
    input (sorted points, positive weights summing to one).
    """

    points: tuple
    weights: tuple

    def __post_init__(self):
        if not self.points:
            raise InvalidDistribution("empty support")
        self._validate_atoms()
        total = sum(self.weights, Fraction(0)) if self.exact else sum(to_mpf(w) for w in self.weights)
        if self.exact:
            if total != 1:
                raise BadWeights(f"weights sum to {total}, not 1")
        elif abs(total - 1) > REAL_TOL * len(self.weights):
            raise BadWeights(f"weights sum to {total}, not 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple], normalize: bool = False) -> "FiniteDist":
        acc: dict = {}
        for k, w in pairs:
            k = int(k)
            w = w if isinstance(w, MPF) else as_fraction(w)
            if w < 0:
                raise InvalidDistribution(f"negative weight at {k}")
            acc[k] = acc.get(k, 0) + w
        items = sorted((k, w) for k, w in acc.items() if w != 0)
        if not items:
            raise InvalidDistribution("no positive weight")
        if normalize:
            total = sum(w for _, w in items)
            items = [(k, w / total) for k, w in items]
        return cls(tuple(k for k, _ in items), tuple(w for _, w in items))

    @classmethod
    def from_dict(cls, mapping: Mapping, normalize: bool = False) -> "FiniteDist":
        return cls.from_pairs(mapping.items(), normalize=normalize)

    @classmethod
    def from_dense(cls, weights: Iterable, offset: int = 0, normalize: bool = False) -> "FiniteDist":
        return cls.from_pairs(((offset + i, w) for i, w in enumerate(weights)), normalize=normalize)

    @classmethod
    def point(cls, c: int) -> "FiniteDist":
        return cls((int(c),), (Fraction(1),))

    @classmethod
    def uniform(cls, points: Iterable[int]) -> "FiniteDist":
        pts = sorted(set(points))
        return cls(tuple(pts), tuple(Fraction(1, len(pts)) for _ in pts))

    def shift(self, r: int) -> "FiniteDist":
        return FiniteDist(tuple(k + r for k in self.points), self.weights)


@dataclass(frozen=True, repr=False)
class SubDist(_Atoms):
    """Atoms of total mass at most one; the missing mass lives above a cap."""

    points: tuple
    weights: tuple

    def __post_init__(self):
        self._validate_atoms()
        if self.weights and sum(self.weights) > 1:
            raise BadWeights("sub-probability mass exceeds 1")

    def renormalized(self) -> FiniteDist:
        total = self.mass
        if total == 0:
            raise AllMassAtZero("no mass below the cap")
        return FiniteDist(self.points, tuple(w / total for w in self.weights))


# ---------------------------------------------------------------------------
# scalar functionals


def survival(d: _Atoms, t, strict: bool = True):
    """``P[X > t]`` when ``strict`` else ``P[X >= t]``; a sum of weights."""
    if strict:
        i = bisect.bisect_right(d.points, t)
    else:
        i = bisect.bisect_left(d.points, t)
    return d._tails[i]


def cdf(d: _Atoms, t):
    """``P[X <= t]``."""
    return d.mass - survival(d, t, strict=True)


def _is_nonneg_int(x) -> bool:
    if isinstance(x, bool):
        return False
    if isinstance(x, int):
        return x >= 0
    if isinstance(x, Fraction):
        return x.denominator == 1 and x >= 0
    return False


def moment(d: _Atoms, beta):
    """``E[X**beta]``; exact when ``beta`` is a nonnegative integer."""
    if _is_nonneg_int(beta):
        b = int(beta)
        if b == 0:
            return d.mass
        return sum((k**b * w for k, w in d), Fraction(0) if d.exact else to_mpf(0))
    b = to_mpf(beta)
    if b <= 0:
        raise ValueError("beta must be positive")
    return sum(to_mpf(w) * _real.ctx.power(k, b) for k, w in d if k > 0)


def mu_factor(d: FiniteDist, alpha, beta):
    """The rescaling factor ``(beta/alpha * E[X**beta]) ** (1/beta)``."""
    m = moment(d, beta)
    if m == 0:
        raise ZeroMass("E[X^beta] = 0")
    if _is_rational(alpha) and _is_nonneg_int(beta) and int(beta) == 1:
        return Fraction(1) / as_fraction(alpha) * m
    base = to_mpf(beta) / to_mpf(alpha) * to_mpf(m)
    return _real.ctx.power(base, 1 / to_mpf(beta))


def mrl(d: _Atoms, t) -> Fraction:
    """Mean residual life ``E[X - t | X > t]``, zero when ``P[X > t] = 0``."""
    i = bisect.bisect_right(d.points, t)
    tail = d._tails[i]
    if tail == 0:
        return Fraction(0)
    return d._first_moment_tails[i] / tail - t


# ---------------------------------------------------------------------------
# exact dense integer machinery


def _to_scaled_ints(d: _Atoms, length: int | None = None) -> tuple[list[int], int]:
    """Dense numerators on ``0..max`` over a common denominator."""
    den = 1
    for w in d.weights:
        den = den * w.denominator // _gcd(den, w.denominator)
    size = d.max + 1 if length is None else length
    out = [0] * size
    for k, w in zip(d.points, d.weights):
        if k < size:
            out[k] = w.numerator * (den // w.denominator)
    return out, den


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def _polymul(a: list[int], b: list[int], limit: int) -> list[int]:
    """Product of nonnegative integer coefficient lists, truncated to ``limit`` terms."""
    a = a[:limit]
    b = b[:limit]
    if not a or not b:
        return []
    if min(len(a), len(b)) <= 8:
        out = [0] * min(limit, len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b[: len(out) - i]):
                out[i + j] += x * y
        return out
    # Kronecker substitution: pack both sequences into single integers.
    bits = max(a).bit_length() + max(b).bit_length() + min(len(a), len(b)).bit_length() + 1
    width = (bits + 7) // 8
    A = int.from_bytes(b"".join(x.to_bytes(width, "little") for x in a), "little")
    B = int.from_bytes(b"".join(x.to_bytes(width, "little") for x in b), "little")
    n_out = min(limit, len(a) + len(b) - 1)
    C = _bigmul(A, B)
    raw = C.to_bytes(width * (len(a) + len(b)), "little")
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little") for i in range(n_out)]


try:  # GMP multiplication is much faster for million-bit operands
    import gmpy2

    def _bigmul(x: int, y: int) -> int:
        return int(gmpy2.mpz(x) * gmpy2.mpz(y))

except ImportError:  # pragma: no cover

    def _bigmul(x: int, y: int) -> int:
        return x * y


def _from_scaled_ints(ints: list[int], den: int):
    return [(k, Fraction(v, den)) for k, v in enumerate(ints) if v]


# ---------------------------------------------------------------------------
# algebra


def convolve(a: FiniteDist, b: FiniteDist) -> FiniteDist:
    """Law of the independent sum."""
    if not (a.exact and b.exact):
        acc: dict = {}
        for i, x in a:
            for j, y in b:
                acc[i + j] = acc.get(i + j, 0) + x * y
        return FiniteDist.from_pairs(acc.items())
    if len(a) * len(b) <= 4096:
        acc = {}
        for i, x in a:
            for j, y in b:
                acc[i + j] = acc.get(i + j, 0) + x * y
        return FiniteDist.from_pairs(acc.items())
    ia, da = _to_scaled_ints(a)
    ib, db = _to_scaled_ints(b)
    prod = _polymul(ia, ib, len(ia) + len(ib) - 1)
    return FiniteDist.from_pairs(_from_scaled_ints(prod, da * db))


def convolve_power(d: FiniteDist, n: int) -> FiniteDist:
    """``n``-fold convolution; ``n = 0`` gives the point mass at zero."""
    out = FiniteDist.point(0)
    for _ in range(n):
        out = convolve(out, d)
    return out


def mixture(parts: Iterable[tuple]) -> FiniteDist:
    """Mixture of ``(weight, dist)`` pairs; weights must be positive and sum to one."""
    parts = [(as_fraction(w), d) for w, d in parts]
    if any(w <= 0 for w, _ in parts):
        raise BadWeights("mixture weights must be positive")
    if sum(w for w, _ in parts) != 1:
        raise BadWeights("mixture weights must sum to 1")
    acc: dict = {}
    for w, d in parts:
        for k, x in d:
            acc[k] = acc.get(k, 0) + w * x
    return FiniteDist.from_pairs(acc.items())


def thin(d: FiniteDist, p) -> FiniteDist:
    """Binomial thinning ``Bin(X, p)``."""
    p = as_fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("thinning probability must lie in [0, 1]")
    if p == 1:
        return d
    if p == 0:
        return FiniteDist.point(0)
    a, b = p.numerator, p.denominator
    q = b - a
    nums, den = _to_scaled_ints(d)
    top = d.max
    # P[out = j] * den * b**top = sum_k nums[k] C(k, j) a^j q^(k-j) b^(top-k)
    out = [0] * (top + 1)
    apow = [a**j for j in range(top + 1)]
    qpow = [q**j for j in range(top + 1)]
    for k in d.points:
        nk = nums[k] * b ** (top - k)
        for j in range(k + 1):
            out[j] += nk * comb(k, j) * apow[j] * qpow[k - j]
    return FiniteDist.from_pairs(_from_scaled_ints(out, den * b**top))


def zero_truncate(d: FiniteDist) -> FiniteDist:
    """Conditional law ``[X | X > 0]``."""
    tail = survival(d, 0, strict=True)
    if tail == 0:
        raise AllMassAtZero("P[X > 0] = 0")
    if d.points[0] != 0:
        return d
    return FiniteDist(d.points[1:], tuple(w / tail for w in d.weights[1:]))


def compound(count: FiniteDist, summand: FiniteDist, cap: int | None = None,
             precision_bits: int | None = None):
    """Law of ``X_1 + ... + X_L`` for ``L ~ count`` and i.i.d. ``X_i ~ summand``.

    Mass above ``cap`` is dropped and returned as ``truncated_mass``; below the
    cap the atoms are exact.  Returns ``(FiniteDist, 0)`` when nothing was
    truncated and ``(SubDist, truncated_mass)`` otherwise.

    With ``precision_bits`` set, every intermediate value is rounded *down* to
    a multiple of ``2**-precision_bits``.  The returned atoms are then exact
    lower bounds on the true probabilities and ``truncated_mass`` is the total
    unaccounted mass (beyond the cap plus rounding), so every true atom lies in
    ``[w, w + truncated_mass]``.
    """
    if cap is None:
        cap = count.max * summand.max
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    size = cap + 1
    if precision_bits is None:
        xs, dx = _to_scaled_ints(summand, min(size, summand.max + 1))
        cs, dc = _to_scaled_ints(count)
        # Horner on the generating function: acc <- acc * G_X + p_k
        acc, dacc = [cs[count.max]], dc
        for k in range(count.max - 1, -1, -1):
            acc = _polymul(acc, xs, size)
            dacc *= dx
            scale = dacc // dc
            if cs[k]:
                if not acc:
                    acc = [0]
                acc[0] += cs[k] * scale
        atoms = _from_scaled_ints(acc, dacc)
    else:
        P = int(precision_bits)
        one = 1 << P
        xs = [(w.numerator << P) // w.denominator for w in summand.dense()[:size]]
        cs = [(w.numerator << P) // w.denominator for w in count.dense()]
        acc = [cs[-1]]
        for k in range(count.max - 1, -1, -1):
            acc = [v >> P for v in _polymul(acc, xs, size)]
            if cs[k]:
                if not acc:
                    acc = [0]
                acc[0] += cs[k]
        atoms = _from_scaled_ints(acc, one)
    total = sum((w for _, w in atoms), Fraction(0))
    truncated = 1 - total
    if truncated == 0:
        return FiniteDist.from_pairs(atoms), Fraction(0)
    return SubDist(tuple(k for k, _ in atoms), tuple(w for _, w in atoms)), truncated


# ---------------------------------------------------------------------------
# JSON


def _fmt(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def dist_to_json(d: _Atoms) -> dict:
    if not d.exact:
        return {"support": list(d.points), "weights": [_real.ctx.nstr(w, 40) for w in d.weights],
                "exact": False}
    return {"support": list(d.points), "weights": [_fmt(w) for w in d.weights]}


def dist_from_json(obj, normalize: bool = False) -> FiniteDist:
    """Parse the ``{"support": [...], "weights": ["n/d", ...]}`` format."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        support = obj["support"]
        weights = obj["weights"]
    except (KeyError, TypeError) as exc:
        raise InvalidDistribution("expected keys 'support' and 'weights'") from exc
    if len(support) != len(weights):
        raise InvalidDistribution("support and weights differ in length")
    pairs = []
    for k, w in zip(support, weights):
        if isinstance(k, bool) or not isinstance(k, int):
            raise InvalidDistribution(f"support point {k!r} is not an integer")
        try:
            pairs.append((k, as_fraction(w)))
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise InvalidDistribution(f"bad weight {w!r}") from exc
    if len(set(support)) != len(support):
        raise InvalidDistribution("duplicate support points")
    if any(k < 0 for k in support):
        raise InvalidDistribution("support must be nonnegative")
    total = sum(w for _, w in pairs)
    if total != 1 and not normalize:
        raise BadWeights(f"weights sum to {total}; pass normalize=True to rescale")
    return FiniteDist.from_pairs(pairs, normalize=normalize)


def load_dist(path, normalize: bool = False) -> FiniteDist:
    with open(path) as fh:
        return dist_from_json(json.load(fh), normalize=normalize)
