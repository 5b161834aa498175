"""Command-line entry point.

Every subcommand prints JSON to stdout (or CSV with ``--csv``).  Exit status
is 0 when all requested checks hold, 1 when one fails, and 2 for usage errors
and for inputs outside a result's stated domain or hypotheses.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from . import bounds, dist, gw, orders, reliability, sims, transforms, urn, verify
from .dist import as_fraction, dist_to_json, load_dist
from .errors import EqkError
from .report import CheckReport, jsonable

__all__ = ["main", "build_parser"]


class _Out:
    """Collects what a command wants printed and whether it passed."""

    def __init__(self, payload, ok: bool = True, rows=None, header=None):
        self.payload = payload
        self.ok = ok
        self.rows = rows
        self.header = header


def _report_out(rep: CheckReport) -> _Out:
    if rep.table:
        return _Out(rep.to_dict(), rep.holds, rep.table, ["side", "t", "exact_tail", "bound", "margin"])
    rows = [(jsonable(label), m, "" if label not in rep.witnesses else "FAIL") for label, m in rep.margins]
    return _Out(rep.to_dict(), rep.holds, rows, ["label", "margin", "status"])


def _dist_out(d) -> _Out:
    return _Out(dist_to_json(d), True, list(d), ["k", "p"])


def _load(args, path):
    return load_dist(path, normalize=args.normalize)


def _frac(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _real_arg(text: str):
    """Keep decimal and n/d input exact; leave anything else to mpmath."""
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        return bounds._num(text)


# ---------------------------------------------------------------------------
# dist


def cmd_dist(args) -> _Out:
    d = _load(args, args.file)
    op = args.op
    if op == "show":
        return _dist_out(d)
    if op == "stats":
        out = {"mean": d.mean, "mass": d.mass, "support": [d.min, d.max], "size": len(d)}
        for b in args.moment or []:
            out[f"E[X^{b}]"] = dist.moment(d, b)
        return _Out(jsonable(out), True, list(out.items()), ["stat", "value"])
    if op == "survival":
        ts = bounds.parse_grid(args.t)
        rows = [(t, dist.survival(d, t, strict=not args.weak), dist.mrl(d, t)) for t in ts]
        return _Out(jsonable([{"t": t, "survival": s, "mrl": m} for t, s, m in rows]), True, rows,
                    ["t", "survival", "mrl"])
    if op == "convolve":
        return _dist_out(dist.convolve(d, _load(args, args.other)))
    if op == "thin":
        return _dist_out(dist.thin(d, args.p))
    if op == "zero-truncate":
        return _dist_out(dist.zero_truncate(d))
    if op == "compound":
        z, lost = dist.compound(d, _load(args, args.other), cap=args.cap)
        out = _dist_out(z)
        out.payload = {**out.payload, "truncated_mass": jsonable(lost)}
        return out
    raise AssertionError(op)


# ---------------------------------------------------------------------------
# transform


def cmd_transform(args) -> _Out:
    d = _load(args, args.file)
    op = args.op
    if op == "power-bias":
        return _dist_out(transforms.power_bias(d, args.beta))
    if op == "size-bias":
        return _dist_out(transforms.size_bias(d))
    if op == "rising-bias":
        return _dist_out(transforms.rising_factorial_bias(d, args.r))
    if op == "equilibrium":
        return _dist_out(transforms.discrete_equilibrium(d))
    if op == "gen-equilibrium":
        g = transforms.gen_equilibrium(d, args.alpha, args.beta)
        ts = bounds.parse_grid(args.t_grid)
        rows = [(t, g.survival(t)) for t in ts]
        payload = {"alpha": jsonable(args.alpha), "beta": jsonable(args.beta), "exact": g.exact,
                   "survival": [{"t": jsonable(t), "value": jsonable(s)} for t, s in rows]}
        return _Out(payload, True, rows, ["t", "survival"])
    if op == "record":
        ts = bounds.parse_grid(args.t_grid)
        rows = [(t, transforms.record_survival(d, t)) for t in ts]
        return _Out(jsonable([{"t": t, "record_survival": v} for t, v in rows]), True, rows,
                    ["t", "record_survival"])
    if op == "verify":
        params = {}
        if args.kind == "sum":
            params["n"] = args.n
        elif args.kind == "power_to_factorial":
            params["l"] = args.l
        elif args.kind == "mixture":
            parts = [d] + [_load(args, p) for p in args.parts]
            ws = [_frac(w) for w in args.weights.split(",")] if args.weights else [Fraction(1, len(parts))] * len(parts)
            params.update(weights=ws, parts=parts)
        elif args.kind == "scaling":
            params.update(alpha=args.alpha, beta=args.beta, gamma=args.gamma, t_grid=bounds.parse_grid(args.t_grid))
        return _report_out(transforms.verify_transform_identities(args.kind, d, **params))
    raise AssertionError(op)


# ---------------------------------------------------------------------------
# order / classify


def cmd_order(args) -> _Out:
    x, y = _load(args, args.x), _load(args, args.y)
    if args.op == "compare":
        rep = orders.utail_pmax(x, y) if args.kind == "utail" else orders.ltail_pmax(x, y)
        payload = {"kind": args.kind, **rep.to_dict()}
        ok = True
        if args.p is not None:
            ok = orders.order_holds(x, y, args.p, args.kind)
            payload["p"] = jsonable(args.p)
            payload["holds_at_p"] = ok
        return _Out(payload, ok, list(payload.items()), ["field", "value"])
    if args.p is None or args.p == 1:
        joint = orders.monotone_coupling(x, y)
    else:
        joint = orders.relaxed_coupling(x, y, args.p, args.kind)
    rows = sorted(joint.items())
    payload = [{"x": i, "y": j, "mass": jsonable(m)} for (i, j), m in rows]
    return _Out(payload, True, [(i, j, m) for (i, j), m in rows], ["x", "y", "mass"])


def cmd_classify(args) -> _Out:
    d = _load(args, args.file)
    out = reliability.classify(d)
    rows = [(k, v.get("verdict"), v.get("witness")) for k, v in out.items() if isinstance(v, dict)]
    return _Out(out, True, rows, ["class", "verdict", "witness"])


# ---------------------------------------------------------------------------
# urn


def _urn_spec(args) -> urn.UrnSpec:
    schedule = tuple(int(x) for x in args.schedule.split(",")) if args.schedule else None
    return urn.UrnSpec(args.b, args.w, args.n, args.l, schedule)


def _range(text: str) -> list:
    if "-" in text.strip("-"):
        a, b = text.split("-", 1)
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",")]


def cmd_urn(args) -> _Out:
    if args.op == "pmf":
        return _dist_out(urn.urn_pmf(_urn_spec(args)))
    if args.op == "moment":
        spec = _urn_spec(args)
        v = urn.rf_moment(spec, args.r)
        return _Out({"r": args.r, "rising_factorial_moment": jsonable(v)}, True, [(args.r, v)], ["r", "moment"])
    if args.op == "moment-bound":
        best, bound, values = urn.moment_tail_bound(args.n, _real_arg(args.t))
        payload = {"n": args.n, "t": jsonable(args.t), "best_m": best, "bound": jsonable(bound)}
        return _Out(payload, True, sorted(values.items()), ["m", "bound"])
    if args.op == "verify":
        specs = urn.grid_specs(_range(args.b_range), _range(args.w_range), _range(args.l_range), _range(args.n_range))
        return _report_out(urn.verify_urn_lemmas(args.kind, specs))
    raise AssertionError(args.op)


# ---------------------------------------------------------------------------
# gw


def cmd_gw(args) -> _Out:
    if args.op == "generation":
        child = sims.parse_child(args.child, args.normalize)
        z, lost = gw.gw_generation(gw.GWSpec(child, args.n, args.cap, args.budget))
        out = _dist_out(z)
        out.payload = {**out.payload, "truncated_mass": jsonable(lost),
                       "conditional_mean": jsonable(gw.conditional_mean(z)) if dist.survival(z, 0) else None}
        return out
    kind = args.kind
    if kind == "counterexamples":
        return _report_out(gw.verify_counterexamples())
    if kind == "gw1" and args.child is None:
        child = gw.truncated_geometric(Fraction(1, 2), 60)
    elif args.child is None:
        raise EqkError(f"--child is required for --kind {kind}")
    else:
        child = sims.parse_child(args.child, args.normalize)
    summand = sims.parse_child(args.summand, args.normalize) if args.summand else None
    return _report_out(gw.verify_gw_closures(kind, child, args.n_max, summand=summand,
                                             cap=args.cap or 2000, explore=args.explore))


# ---------------------------------------------------------------------------
# bounds


def _kv(text: str) -> dict:
    out = {}
    for part in filter(None, (s.strip() for s in (text or "").split(","))):
        k, _, v = part.partition("=")
        out[k.strip()] = _real_arg(v.strip())
    return out


def cmd_bounds(args) -> _Out:
    if args.op == "eval":
        spec = bounds.BoundSpec(args.alpha, args.beta, args.p)
        fn = bounds.lower_tail_bound if args.lower else bounds.upper_tail_bound
        rows = []
        for t in bounds.parse_grid(args.t):
            rows.append((t, fn(spec, t, unsafe=args.unsafe_extrapolate)))
        payload = {"side": "lower" if args.lower else "upper", "certified": not args.unsafe_extrapolate,
                   "values": [{"t": jsonable(t), "bound": jsonable(v)} for t, v in rows]}
        return _Out(payload, True, rows, ["t", "bound"])
    if args.op == "check":
        d = _load(args, args.dist)
        grid = bounds.parse_grid(args.t_grid) if args.t_grid else ()
        lgrid = bounds.parse_grid(args.lower_grid) if args.lower_grid else ()
        if not grid and not lgrid:
            raise EqkError("give --t-grid and/or --lower-grid")
        rep = bounds.check_bounds_against(d, args.alpha, args.beta, args.p, grid, lgrid)
        out = _report_out(rep)
        out.rows = [(t, tail, bound, margin, side) for side, t, tail, bound, margin in rep.table]
        out.header = ["t", "exact_tail", "bound", "margin", "side"]
        return out
    if args.op == "lemma":
        d = _load(args, args.dist)
        grid = bounds.parse_grid(args.t_grid) if args.t_grid else None
        return _report_out(bounds.verify_tail_lemmas(args.kind, d, args.alpha, args.beta, args.p, grid))
    if args.op == "fixture":
        return _report_out(bounds.analytic_fixture_checks(args.name, _kv(args.params)))
    raise AssertionError(args.op)


# ---------------------------------------------------------------------------
# simulation


def cmd_simulate(args) -> _Out:
    model, params = sims.parse_model(args.model)
    if args.exhaustive:
        d = sims.enumerate_model(model, params)
        out = _dist_out(d)
        out.payload = {"model": model, "exhaustive": True, "law": out.payload}
    else:
        emp = sims.simulate(sims.SimConfig(model, params, args.samples, args.seed, args.workers))
        payload = {"model": model, "seed": args.seed, **emp.to_dict()}
        out = _Out(payload, True, [(k, c, c / emp.samples) for k, c in sorted(emp.counts.items())],
                   ["k", "count", "freq"])
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(out.payload, fh, indent=1)
    return out


def cmd_crossvalidate(args) -> _Out:
    model, params = sims.parse_model(args.model)
    samples = None if args.exhaustive else args.samples
    return _report_out(sims.crossvalidate(model, params, samples, args.seed, args.workers, args.threshold))


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> _Out:
    if args.op == "all":
        numbers = None
    else:
        numbers = [args.number]
    reps = verify.run_all(args.budget, numbers)
    rows = [(r.params["criterion"], r.name, r.holds, r.params["seconds"]) for r in reps]
    payload = {"budget": args.budget, "holds": all(r.holds for r in reps),
               "criteria": [r.to_dict() for r in reps]}
    for n, name, ok, secs in rows:
        print(f"criterion {n:2d} {name:24s} {'PASS' if ok else 'FAIL'} ({secs:.1f}s)", file=sys.stderr)
    return _Out(payload, payload["holds"], rows, ["criterion", "name", "holds", "seconds"])


# ---------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--csv", action="store_true", help="print a CSV table instead of JSON")
    p.add_argument("--normalize", action="store_true", help="rescale input weights that do not sum to 1")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="eqk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(group, name, help_):
        return group.add_parser(name, help=help_, parents=[common])

    # dist
    p = sub.add_parser("dist", help="inspect and combine distributions")
    g = p.add_subparsers(dest="op", required=True)
    for name in ("show", "stats", "survival", "convolve", "thin", "zero-truncate", "compound"):
        q = leaf(g, name, f"dist {name}")
        q.add_argument("file")
        q.set_defaults(func=cmd_dist)
        if name == "stats":
            q.add_argument("--moment", type=_frac, action="append")
        if name == "survival":
            q.add_argument("--t", required=True, help="grid a:b:step or comma list")
            q.add_argument("--weak", action="store_true", help="P[X >= t] instead of P[X > t]")
        if name in ("convolve", "compound"):
            q.add_argument("other", help="second law (the summand for compound)")
        if name == "compound":
            q.add_argument("--cap", type=int)
        if name == "thin":
            q.add_argument("--p", type=_frac, required=True)

    # transform
    p = sub.add_parser("transform", help="size bias, equilibrium and related transforms")
    g = p.add_subparsers(dest="op", required=True)
    for name in ("power-bias", "size-bias", "rising-bias", "equilibrium", "gen-equilibrium", "record", "verify"):
        q = leaf(g, name, f"transform {name}")
        q.add_argument("file")
        q.set_defaults(func=cmd_transform)
    g.choices["power-bias"].add_argument("--beta", type=_frac, required=True)
    g.choices["rising-bias"].add_argument("--r", type=int, required=True)
    q = g.choices["gen-equilibrium"]
    q.add_argument("--alpha", type=_real_arg, required=True)
    q.add_argument("--beta", type=_real_arg, required=True)
    q.add_argument("--t-grid", default="0:5:1/2")
    g.choices["record"].add_argument("--t-grid", default="0:10:1")
    q = g.choices["verify"]
    q.add_argument("--kind", choices=["scaling", "sum", "mixture", "power_to_factorial"], required=True)
    q.add_argument("--n", type=int, default=2)
    q.add_argument("--l", type=int, default=1)
    q.add_argument("--parts", nargs="*", default=[])
    q.add_argument("--weights")
    q.add_argument("--alpha", type=_real_arg, default=1)
    q.add_argument("--beta", type=_real_arg, default=1)
    q.add_argument("--gamma", type=_real_arg, default=2)
    q.add_argument("--t-grid", default="1/2:5:1/2")

    # order
    p = sub.add_parser("order", help="stochastic orders and couplings")
    g = p.add_subparsers(dest="op", required=True)
    for name in ("compare", "coupling"):
        q = leaf(g, name, f"order {name}")
        q.add_argument("--x", required=True)
        q.add_argument("--y", required=True)
        q.add_argument("--kind", choices=["utail", "ltail"], default="utail")
        q.add_argument("--p", type=_frac)
        q.set_defaults(func=cmd_order)

    q = leaf(sub, "classify", "log-concave, D-IFR, NBUE and NBUEZT verdicts")
    q.add_argument("file")
    q.set_defaults(func=cmd_classify)

    # urn
    p = sub.add_parser("urn", help="exact urn laws and lemma checks")
    g = p.add_subparsers(dest="op", required=True)
    for name in ("pmf", "moment"):
        q = leaf(g, name, f"urn {name}")
        q.add_argument("--b", type=int, required=True)
        q.add_argument("--w", type=int, required=True)
        q.add_argument("--l", type=int, default=1)
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--schedule", help="explicit ball counts B_0,B_1,...")
        q.set_defaults(func=cmd_urn)
    g.choices["moment"].add_argument("--r", type=int, required=True)
    q = leaf(g, "moment-bound", "best Markov bound from rising factorial moments of P_n(1,2)")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--t", required=True)
    q.set_defaults(func=cmd_urn)
    q = leaf(g, "verify", "check one urn lemma over a parameter grid")
    q.add_argument("--kind", choices=["lc", "tech", "variant", "unfac", "ineq"], required=True)
    q.add_argument("--b-range", default="0-3")
    q.add_argument("--w-range", default="1-4")
    q.add_argument("--l-range", default="1-3")
    q.add_argument("--n-range", default="20")
    q.set_defaults(func=cmd_urn)

    # gw
    p = sub.add_parser("gw", help="Galton-Watson generations and closure checks")
    g = p.add_subparsers(dest="op", required=True)
    q = leaf(g, "generation", "exact law of Z_n")
    q.add_argument("--child", required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--cap", type=int)
    q.add_argument("--budget", type=_frac, default=Fraction(0), help="allowed truncated mass")
    q.set_defaults(func=cmd_gw)
    q = leaf(g, "verify", "closure theorems and counterexamples")
    q.add_argument("--kind", choices=["gw1", "gw2", "randsum", "counterexamples"], required=True)
    q.add_argument("--child", help="child law (count law for randsum); gw1 defaults to truncated Geometric(1/2)")
    q.add_argument("--summand")
    q.add_argument("--n-max", type=int, default=3)
    q.add_argument("--cap", type=int)
    q.add_argument("--explore", action="store_true", help="gw2: also run NBUEZT children that are not D-IFR")
    q.set_defaults(func=cmd_gw)

    # bounds
    p = sub.add_parser("bounds", help="tail bound evaluators and checks")
    g = p.add_subparsers(dest="op", required=True)
    q = leaf(g, "eval", "evaluate a tail bound")
    q.add_argument("--alpha", type=_real_arg, required=True)
    q.add_argument("--beta", type=_real_arg, required=True)
    q.add_argument("--p", type=_real_arg, default=Fraction(1))
    q.add_argument("--t", required=True, help="value, comma list or a:b:step")
    q.add_argument("--lower", action="store_true")
    q.add_argument("--unsafe-extrapolate", action="store_true",
                   help="evaluate outside the established domain (output is not certified)")
    q.set_defaults(func=cmd_bounds)
    q = leaf(g, "check", "exact tails of a law against both bounds")
    q.add_argument("--dist", required=True)
    q.add_argument("--alpha", type=_real_arg, required=True)
    q.add_argument("--beta", type=_real_arg, required=True)
    q.add_argument("--p", type=_real_arg, default=Fraction(1))
    q.add_argument("--t-grid")
    q.add_argument("--lower-grid")
    q.set_defaults(func=cmd_bounds)
    q = leaf(g, "lemma", "integral, mean-residual and record lemmas")
    q.add_argument("--kind", choices=["int", "mrl", "recexp", "recbnd"], required=True)
    q.add_argument("--dist", required=True)
    q.add_argument("--alpha", type=_real_arg, default=Fraction(1))
    q.add_argument("--beta", type=_real_arg, default=Fraction(1))
    q.add_argument("--p", type=_real_arg, default=Fraction(1))
    q.add_argument("--t-grid")
    q.set_defaults(func=cmd_bounds)
    q = leaf(g, "fixture", "capped geometric and exponential mixture fixtures")
    q.add_argument("--name", choices=["capped", "mixture"], required=True)
    q.add_argument("--params", default="", help="k=v pairs, e.g. mu=10,t=2")
    q.set_defaults(func=cmd_bounds)

    # simulation
    for name, func in (("simulate", cmd_simulate), ("crossvalidate", cmd_crossvalidate)):
        q = leaf(sub, name, f"{name} an application model")
        q.add_argument("--model", required=True, help='e.g. "pref_attach(w=1,l=1,n=30)"')
        q.add_argument("--samples", type=int, default=100_000)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--workers", type=int, default=1)
        q.add_argument("--exhaustive", action="store_true", help="enumerate every outcome instead of sampling")
        q.set_defaults(func=func)
    sub.choices["simulate"].add_argument("--out")
    sub.choices["crossvalidate"].add_argument("--threshold", type=float, default=sims.TV_THRESHOLD)

    # verify
    p = sub.add_parser("verify", help="run the acceptance suite")
    g = p.add_subparsers(dest="op", required=True)
    q = leaf(g, "all", "every criterion")
    q.add_argument("--budget", choices=["small", "full"], default="small")
    q.set_defaults(func=cmd_verify)
    q = leaf(g, "criterion", "one criterion by number")
    q.add_argument("number", type=int, choices=sorted(verify.CRITERIA))
    q.add_argument("--budget", choices=["small", "full"], default="full")
    q.set_defaults(func=cmd_verify)
    return parser


def _cell(v):
    v = jsonable(v)
    return json.dumps(v) if isinstance(v, (list, dict)) else v


def _emit(out: _Out, as_csv: bool):
    if as_csv and out.rows is not None:
        w = csv.writer(sys.stdout)
        w.writerow(out.header)
        for row in out.rows:
            w.writerow([_cell(v) for v in row])
    else:
        json.dump(jsonable(out.payload), sys.stdout, indent=1)
        sys.stdout.write("\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except (EqkError, ValueError) as exc:
        # EqkError subclasses ValueError; plain ValueErrors come from malformed input
        print(f"eqk: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"eqk: {exc}", file=sys.stderr)
        return 2
    _emit(out, args.csv)
    return 0 if out.ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
