"""Seeded Monte Carlo for the application models, cross-validated against exact urn laws.

Samples are drawn in fixed-size blocks.  Block ``j`` uses the generator
``default_rng([master_seed, j])``, so the empirical law depends only on the
model, the sample count and the seed; worker count only changes who draws
which block.  Every sampler also has an exhaustive enumeration for small
parameters, which gives the exact law of the raw model (not of the urn).
"""

from __future__ import annotations

import itertools
import math
import os
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dist import FiniteDist, dist_from_json, load_dist
from .errors import BadConfig, BudgetExceeded
from .gw import GWSpec, gw_generation
from .report import CheckReport
from .urn import EXACT_N_BUDGET, UrnSpec, urn_pmf

__all__ = [
    "MODELS",
    "SimConfig",
    "EmpiricalDist",
    "parse_model",
    "simulate",
    "enumerate_model",
    "exact_law",
    "urn_map",
    "tv_distance",
    "crossvalidate",
    "BLOCK_SIZE",
    "TV_THRESHOLD",
]

BLOCK_SIZE = 4096
TV_THRESHOLD = 0.02

MODELS = {
    "pref_attach": ("w", "l", "n"),
    "walk_local_time": ("steps",),
    "walk_bridge_local_time": ("steps",),
    "binary_tree_subtree": ("n_leaves", "k"),
    "gw": ("child", "n"),
}

# largest parameters the exhaustive enumerators accept
_ENUM_LIMITS = {"pref_attach": 8, "walk_local_time": 20, "walk_bridge_local_time": 24, "binary_tree_subtree": 8}


@dataclass(frozen=True)
class SimConfig:
    model: str
    params: dict
    samples: int
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.model not in MODELS:
            raise BadConfig(f"unknown model {self.model!r}; choose from {sorted(MODELS)}")
        missing = [k for k in MODELS[self.model] if k not in self.params]
        if missing:
            raise BadConfig(f"model {self.model} needs {', '.join(missing)}")
        if self.samples < 1:
            raise BadConfig("samples must be positive")
        if self.workers < 1:
            raise BadConfig("workers must be positive")
        if not 0 <= self.master_seed < 2**64:
            raise BadConfig("master_seed must be a 64-bit unsigned integer")
        _validate_params(self.model, self.params)


def _validate_params(model: str, p: dict):
    ints = [k for k in MODELS[model] if k != "child"]
    for k in ints:
        v = p[k]
        if not isinstance(v, int) or isinstance(v, bool):
            raise BadConfig(f"{k} must be an integer")
    if model == "pref_attach" and (p["w"] < 1 or p["l"] < 1 or p["n"] < 0):
        raise BadConfig("pref_attach needs w >= 1, l >= 1, n >= 0")
    if model in ("walk_local_time", "walk_bridge_local_time") and p["steps"] < 0:
        raise BadConfig("steps must be nonnegative")
    if model == "walk_bridge_local_time" and p["steps"] % 2:
        raise BadConfig("a bridge needs an even number of steps")
    if model == "binary_tree_subtree" and not 1 <= p["k"] <= p["n_leaves"]:
        raise BadConfig("need 1 <= k <= n_leaves")
    if model == "gw":
        if not isinstance(p["child"], FiniteDist):
            raise BadConfig("gw child must be a FiniteDist")
        if p["n"] < 0:
            raise BadConfig("n must be nonnegative")


@dataclass
class EmpiricalDist:
    counts: dict = field(default_factory=dict)
    samples: int = 0

    def __post_init__(self):
        if sum(self.counts.values()) != self.samples:
            raise BadConfig("counts do not sum to the sample count")

    def freq(self, k) -> Fraction:
        return Fraction(self.counts.get(k, 0), self.samples)

    @property
    def mean(self) -> float:
        return sum(k * c for k, c in self.counts.items()) / self.samples

    @property
    def var(self) -> float:
        m = self.mean
        return sum(c * (k - m) ** 2 for k, c in self.counts.items()) / self.samples

    def to_dist(self) -> FiniteDist:
        return FiniteDist.from_dict({k: self.freq(k) for k in self.counts})

    def to_dict(self) -> dict:
        return {"samples": self.samples, "counts": {str(k): self.counts[k] for k in sorted(self.counts)}}


# ---------------------------------------------------------------------------
# model strings


_MODEL_RE = re.compile(r"^\s*(\w+)\s*(?:[(:]\s*(.*?)\s*\)?\s*)?$")


def parse_model(text: str) -> tuple[str, dict]:
    """``"pref_attach(w=1,l=1,n=30)"`` or ``"pref_attach:w=1,l=1,n=30"`` to ``(name, params)``.

    For ``gw`` the child is a dist JSON file path or inline weights like
    ``child=0:1/4;1:1/4;2:1/2``.
    """
    m = _MODEL_RE.match(text)
    if not m:
        raise BadConfig(f"cannot parse model {text!r}")
    name, body = m.group(1), m.group(2) or ""
    params: dict = {}
    for part in filter(None, (s.strip() for s in body.split(","))):
        if "=" not in part:
            raise BadConfig(f"model parameter {part!r} is not key=value")
        key, val = (s.strip() for s in part.split("=", 1))
        if key == "child":
            params[key] = parse_child(val)
        else:
            try:
                params[key] = int(val)
            except ValueError:
                raise BadConfig(f"{key}={val!r} is not an integer") from None
    if name not in MODELS:
        raise BadConfig(f"unknown model {name!r}; choose from {sorted(MODELS)}")
    return name, params


def parse_child(val: str, normalize: bool = False) -> FiniteDist:
    """A dist JSON file path, or inline ``k:w;k:w`` pairs."""
    if os.path.exists(val):
        return load_dist(val, normalize=normalize)
    try:
        pairs = [item.split(":") for item in val.split(";") if item]
        return dist_from_json({"support": [int(k) for k, _ in pairs], "weights": [w for _, w in pairs]},
                              normalize=normalize)
    except ValueError as exc:
        raise BadConfig(f"child {val!r} is neither a file nor k:w;k:w pairs ({exc})") from None


# ---------------------------------------------------------------------------
# samplers: each draws `size` values with one generator


def _sample_pref_attach(rng, size, w, l, n):
    seed = np.full(size, w, dtype=np.int64)
    total = w
    for m in range(n):
        if m % l == 0:
            total += 1  # a new node arrives with weight one before its first edge
        u = rng.random(size)
        seed += u * total < seed
        total += 1
    return seed


def _sample_walk(rng, size, steps):
    if steps == 0:
        return np.ones(size, dtype=np.int64)
    s = rng.integers(0, 2, size=(size, steps), dtype=np.int8) * 2 - 1
    pos = np.cumsum(s, axis=1, dtype=np.int32)
    return 1 + (pos == 0).sum(axis=1)


def _sample_bridge(rng, size, steps):
    if steps == 0:
        return np.ones(size, dtype=np.int64)
    base = np.tile(np.repeat(np.array([1, -1], dtype=np.int8), steps // 2), (size, 1))
    s = rng.permuted(base, axis=1)
    pos = np.cumsum(s, axis=1, dtype=np.int32)
    return 1 + (pos == 0).sum(axis=1)


def _spanned(parent, leaves) -> int:
    seen = set()
    for v in leaves:
        while v != -1 and v not in seen:
            seen.add(v)
            v = parent[v]
    return len(seen)


def _sample_tree(rng, size, n_leaves, k):
    """Uniform binary trees grown by leaf insertion, all ``size`` trees in parallel.

    Insertion ``j`` picks one of the ``2j - 1`` existing nodes ``x``, puts a
    new internal node ``2j - 1`` in its place and hangs ``x`` and a new leaf
    ``2j`` below it, so the leaves are always the even labels.  Column
    ``2n - 1`` is a sentinel parent for the root.
    """
    nodes = 2 * n_leaves - 1
    sentinel = nodes
    rows = np.arange(size)
    parent = np.full((size, nodes + 1), sentinel, dtype=np.int64)
    for j in range(1, n_leaves):
        x = rng.integers(0, 2 * j - 1, size=size)
        y = 2 * j - 1
        parent[:, y] = parent[rows, x]
        parent[:, y + 1] = y
        parent[rows, x] = y
    # k distinct leaves per tree: first k of a random permutation
    pick = np.argsort(rng.random((size, n_leaves)), axis=1)[:, :k] * 2
    marked = np.zeros((size, nodes + 1), dtype=bool)
    for c in range(k):
        v = pick[:, c]
        for _ in range(nodes):
            marked[rows, v] = True
            v = parent[rows, v]
            if (v == sentinel).all():
                break
    return marked[:, :nodes].sum(axis=1)


def _sample_gw(rng, size, child, n):
    pts = np.array(child.points, dtype=np.int64)
    probs = np.array([float(w) for w in child.weights])
    probs /= probs.sum()
    z = np.ones(size, dtype=np.int64)
    for _ in range(n):
        total = int(z.sum())
        if total == 0:
            break
        kids = rng.choice(pts, size=total, p=probs)
        owner = np.repeat(np.arange(size), z)
        z = np.bincount(owner, weights=kids, minlength=size).astype(np.int64)
    return z


def _draw(model, params, rng, size):
    if model == "pref_attach":
        return _sample_pref_attach(rng, size, params["w"], params["l"], params["n"])
    if model == "walk_local_time":
        return _sample_walk(rng, size, params["steps"])
    if model == "walk_bridge_local_time":
        return _sample_bridge(rng, size, params["steps"])
    if model == "binary_tree_subtree":
        return _sample_tree(rng, size, params["n_leaves"], params["k"])
    return _sample_gw(rng, size, params["child"], params["n"])


def _run_block(args):
    model, params, seed, block, size = args
    rng = np.random.default_rng([seed, block])
    vals, counts = np.unique(_draw(model, params, rng, size), return_counts=True)
    return dict(zip(vals.tolist(), counts.tolist()))


def simulate(cfg: SimConfig) -> EmpiricalDist:
    """Empirical law of the model statistic from ``cfg.samples`` seeded draws."""
    nblocks = -(-cfg.samples // BLOCK_SIZE)
    jobs = [
        (cfg.model, cfg.params, cfg.master_seed, j, min(BLOCK_SIZE, cfg.samples - j * BLOCK_SIZE))
        for j in range(nblocks)
    ]
    total: Counter = Counter()
    if cfg.workers == 1 or nblocks == 1:
        parts = map(_run_block, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=cfg.workers)
        parts = pool.map(_run_block, jobs)
    for part in parts:
        total.update(part)
    if cfg.workers > 1 and nblocks > 1:
        pool.shutdown()
    return EmpiricalDist({int(k): int(v) for k, v in sorted(total.items())}, cfg.samples)


# ---------------------------------------------------------------------------
# exhaustive enumeration of the raw models


def _enum_pref_attach(w, l, n) -> FiniteDist:
    # state: tuple of node weights, node 0 is the seed
    states = {(w,): Fraction(1)}
    for m in range(n):
        nxt: dict = {}
        for weights, pr in states.items():
            if m % l == 0:
                weights = weights + (1,)
            total = sum(weights)
            for i, wi in enumerate(weights):
                new = weights[:i] + (wi + 1,) + weights[i + 1:]
                nxt[new] = nxt.get(new, 0) + pr * Fraction(wi, total)
        states = nxt
    out: dict = {}
    for weights, pr in states.items():
        out[weights[0]] = out.get(weights[0], 0) + pr
    return FiniteDist.from_dict(out)


def _local_time(path) -> int:
    pos, hits = 0, 1
    for s in path:
        pos += s
        hits += pos == 0
    return hits


def _enum_walk(steps) -> FiniteDist:
    c = Counter(_local_time(p) for p in itertools.product((1, -1), repeat=steps))
    return FiniteDist.from_dict({k: Fraction(v, 2**steps) for k, v in c.items()})


def _enum_bridge(steps) -> FiniteDist:
    n = steps // 2
    c: Counter = Counter()
    for ups in itertools.combinations(range(steps), n):
        up = set(ups)
        c[_local_time(1 if i in up else -1 for i in range(steps))] += 1
    total = math.comb(steps, n)
    return FiniteDist.from_dict({k: Fraction(v, total) for k, v in c.items()})


def _enum_tree(n_leaves, k) -> FiniteDist:
    out: Counter = Counter()
    count = 0

    def grow(parent, leaf, root, j):
        nonlocal count
        if j == n_leaves:
            ids = [v for v, is_leaf in enumerate(leaf) if is_leaf]
            for pick in itertools.combinations(ids, k):
                out[_spanned(parent, pick)] += 1
                count += 1
            return
        for x in range(2 * j - 1):
            p = parent.copy()
            y = len(p)
            p.append(p[x])
            p.append(y)
            p[x] = y
            grow(p, leaf + [False, True], y if x == root else root, j + 1)

    grow([-1], [True], 0, 1)
    return FiniteDist.from_dict({v: Fraction(c, count) for v, c in out.items()})


def enumerate_model(model: str, params: dict) -> FiniteDist:
    """Exact law of the model statistic by listing every equally weighted outcome."""
    _validate_params(model, params)
    if model == "gw":
        z, _ = gw_generation(GWSpec(params["child"], params["n"]))
        return z
    key = {"pref_attach": "n", "walk_local_time": "steps", "walk_bridge_local_time": "steps",
           "binary_tree_subtree": "n_leaves"}[model]
    if params[key] > _ENUM_LIMITS[model]:
        raise BudgetExceeded(f"enumeration of {model} is limited to {key} <= {_ENUM_LIMITS[model]}")
    if model == "pref_attach":
        return _enum_pref_attach(params["w"], params["l"], params["n"])
    if model == "walk_local_time":
        return _enum_walk(params["steps"])
    if model == "walk_bridge_local_time":
        return _enum_bridge(params["steps"])
    return _enum_tree(params["n_leaves"], params["k"])


# ---------------------------------------------------------------------------
# cross-validation


def urn_map(model: str, params: dict) -> UrnSpec | None:
    """Urn whose law the model statistic should follow (``None`` for ``gw``)."""
    if model == "pref_attach":
        return UrnSpec(1, params["w"], params["n"], params["l"])
    if model == "walk_local_time":
        return UrnSpec(1, 1, params["steps"] // 2, 1)
    if model == "walk_bridge_local_time":
        return UrnSpec(0, 1, params["steps"] // 2, 1)
    if model == "binary_tree_subtree":
        n, k = params["n_leaves"], params["k"]
        if n - k - 1 < 0:
            raise BadConfig("the urn map needs k < n_leaves")
        return UrnSpec(1, 2 * k, n - k - 1, 1)
    return None


def exact_law(model: str, params: dict) -> FiniteDist:
    """The exact law the simulation is compared to: the mapped urn, or Z_n for ``gw``."""
    spec = urn_map(model, params)
    if spec is None:
        z, _ = gw_generation(GWSpec(params["child"], params["n"]))
        return z
    if spec.n > EXACT_N_BUDGET:
        raise BudgetExceeded(f"mapped urn needs n = {spec.n} > {EXACT_N_BUDGET}")
    return urn_pmf(spec)


def tv_distance(e, d: FiniteDist) -> Fraction:
    """``(1/2) sum_k |e_k - p_k|``; ``e`` is an :class:`EmpiricalDist` or a law."""
    if isinstance(e, EmpiricalDist):
        freq = {k: e.freq(k) for k in e.counts}
    else:
        freq = e.as_dict()
    keys = set(freq) | set(d.points)
    return sum((abs(freq.get(k, 0) - d.pmf(k)) for k in keys), Fraction(0)) / 2


def crossvalidate(model: str, params: dict, samples: int | None = 100_000, seed: int = 0,
                  workers: int = 1, threshold: float = TV_THRESHOLD) -> CheckReport:
    """TV distance between the simulated (or, with ``samples=None``, enumerated)
    law and the exact mapped law."""
    target = exact_law(model, params)
    rep = CheckReport("crossvalidate", params={"model": model, **params, "samples": samples, "seed": seed})
    if samples is None:
        got = enumerate_model(model, params)
        tv = tv_distance(got, target)
        rep.params["mode"] = "exhaustive"
        rep.record("tv", -tv, ok=tv == 0)
    else:
        emp = simulate(SimConfig(model, params, samples, seed, workers))
        tv = tv_distance(emp, target)
        rep.params["mode"] = "monte_carlo"
        rep.params["threshold"] = threshold
        thr = Fraction(str(threshold))
        rep.record("tv", thr - tv, ok=tv < thr)
        rep.params["empirical_mean"] = emp.mean
        rep.params["exact_mean"] = target.mean
    rep.params["tv"] = float(tv)
    if model == "pref_attach" and params["l"] >= 2:
        rep.notes.append("l >= 2: each node's own earlier edges count toward its weight; "
                         "agreement with the urn tests this reading of the model")
    return rep
