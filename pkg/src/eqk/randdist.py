"""Seeded generators of small exact distributions for property tests.

All generators take a :class:`random.Random` so a corpus is reproducible from
one seed.  Weights are rationals with small denominators to keep exact
arithmetic cheap.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .dist import FiniteDist

__all__ = ["random_dist", "random_log_concave", "random_difr", "random_schedule", "corpus"]


def random_dist(rng: random.Random, max_point: int = 12, min_point: int = 1,
                max_size: int | None = None, denom: int = 20) -> FiniteDist:
    """Integer weights in ``1..denom`` on a random subset of ``min_point..max_point``."""
    pts = list(range(min_point, max_point + 1))
    size = rng.randint(1, len(pts) if max_size is None else min(max_size, len(pts)))
    chosen = sorted(rng.sample(pts, size))
    return FiniteDist.from_pairs(((k, rng.randint(1, denom)) for k in chosen), normalize=True)


def random_log_concave(rng: random.Random, max_point: int = 12, min_point: int = 1,
                       denom: int = 8) -> FiniteDist:
    """Log-concave law on a random interval.

    ``log p_k`` is concave exactly when the ratios ``p_{k+1}/p_k`` are
    nonincreasing, so we draw rational ratios and sort them downward.
    """
    lo = rng.randint(min_point, max_point)
    hi = rng.randint(lo, max_point)
    ratios = sorted((Fraction(rng.randint(1, 4 * denom), denom) for _ in range(hi - lo)), reverse=True)
    w = [Fraction(1)]
    for r in ratios:
        w.append(w[-1] * r)
    return FiniteDist.from_pairs(((lo + i, x) for i, x in enumerate(w)), normalize=True)


def random_difr(rng: random.Random, max_point: int = 12, denom: int = 10) -> FiniteDist:
    """Law on ``1..m`` built from a nondecreasing hazard in ``[0, 1]`` ending at 1.

    Zero hazards are allowed, so the result may have gaps below its first atom
    only (a zero hazard after a positive one is impossible by monotonicity).
    """
    m = rng.randint(1, max_point)
    hs = sorted(Fraction(rng.randint(0, denom), denom) for _ in range(m - 1))
    hs.append(Fraction(1))
    surv = Fraction(1)
    pairs = []
    for k, h in enumerate(hs, start=1):
        pairs.append((k, surv * h))
        surv *= 1 - h
        if surv == 0:
            break
    return FiniteDist.from_pairs(pairs)


def random_schedule(rng: random.Random, start: int, n: int, steps=(1, 2, 3)) -> tuple:
    """Strictly increasing ball-count sequence ``B_0 = start, ..., B_{n-1}``."""
    out = [start]
    for _ in range(n - 1):
        out.append(out[-1] + rng.choice(steps))
    return tuple(out)


def corpus(seed: int, count: int, kind: str = "any", **kw) -> list:
    """``count`` distributions from the named generator, all from one seed."""
    rng = random.Random(seed)
    gen = {"any": random_dist, "log_concave": random_log_concave, "difr": random_difr}[kind]
    return [gen(rng, **kw) for _ in range(count)]
