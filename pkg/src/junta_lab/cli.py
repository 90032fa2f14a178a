"""Command-line front end: ``junta-lab <subcommand> ...``.

Exit status is 0 when every check passes, 1 when a check fails and 2 on
usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._cube import bits_of
from . import boosting, composition, experiments, junta, stability
from .boolfn import Distribution, ProbFunction, TruthTable, make_named, uniform_dist
from .exceptions import BoundViolation, JuntaLabError, ProtocolViolation

SCHEMA = 1


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- argument parsing


def _floats(flag, text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None


def _function(flag, spec, arity):
    """A named function (maj, xor, and, or, dict:i, thresh:t) or a table file."""
    path = Path(spec)
    if path.is_file():
        text = path.read_text()
        try:
            return TruthTable.from_text(text)
        except ValueError:
            try:
                return ProbFunction.from_text(text)
            except ValueError as exc:
                raise UsageError(f"{flag} {spec}: {exc}") from None
    if arity is None:
        raise UsageError(f"{flag} {spec!r} is a named function; give its arity")
    try:
        return make_named(spec, arity)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _distribution(flag, spec, n):
    if spec == "uniform":
        return uniform_dist(n)
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"{flag}: {spec!r} is neither 'uniform' nor a readable file")
    try:
        D = Distribution.from_text(path.read_text())
    except ValueError as exc:
        raise UsageError(f"{flag} {spec}: {exc}") from None
    if D.n != n:
        raise UsageError(f"{flag} {spec}: arity {D.n} does not match the function arity {n}")
    return D


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(args, payload, text=None):
    payload = {"schema": SCHEMA, **payload}
    if args.format == "json":
        out = json.dumps(payload, default=_json_default, indent=2) + "\n"
    else:
        out = text if text is not None else _as_text(payload)
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)


def _as_text(payload, indent=""):
    lines = []
    for key, v in payload.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_as_text(v, indent + "  ").rstrip("\n"))
        else:
            lines.append(f"{indent}{key}: {json.dumps(v, default=_json_default)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- subcommands


def cmd_stab(args):
    if args.method == "delta-eps":
        return _partial(args)
    if args.method == "unbal":
        return _unbal(args)
    if args.rho is None:
        raise UsageError(f"--rho is required for method {args.method}")
    rho = _floats("--rho", args.rho)
    try:
        rho = stability.check_rho(rho)
    except ValueError as exc:
        raise UsageError(f"--rho: {exc}") from None
    k = args.k if args.k is not None else len(rho)
    if len(rho) != k:
        raise UsageError(f"--rho has {len(rho)} entries but --k is {k}")
    g = _function("--g", args.g, k)
    if g.n != k:
        raise UsageError(f"--g has arity {g.n}, expected {k}")
    record = {"kind": args.method, "mu": args.mu, "rho": rho.tolist()}
    ok = True
    if args.method == "fourier":
        record["value"] = stability.stab_fourier(g, args.mu, rho)
    elif args.method == "sampled":
        est = stability.stab_sampled(g, args.mu, rho, args.samples, args.seed)
        record.update(value=est.value, stderr=est.stderr, samples=est.samples, seed=args.seed)
    elif args.method == "xor":
        record["value"] = stability.stab_xor_closed(args.mu, rho)
    elif args.method == "amgm":
        res = stability.am_gm_sandwich(g, args.mu, rho)
        record.update(value=res.exact, gm_lower=res.gm_lower, am_upper=res.am_upper)
    return record, ok


def _unbal(args):
    if args.k is None:
        raise UsageError("method unbal needs --k")
    g = _function("--g", args.g, args.k)
    h = _function("--h", args.h, args.k) if args.h else g
    if h.n != g.n:
        raise UsageError(f"--h has arity {h.n}, expected {g.n}")
    value = stability.unbal_stab(g, h, args.mu, (args.a, args.b))
    return {"kind": "unbal", "mu": args.mu, "a": args.a, "b": args.b, "value": value}, True


def _partial(args):
    if args.k is None or args.delta is None or args.eps is None:
        raise UsageError("method delta-eps needs --k, --delta and --eps")
    g = _function("--g", args.g, args.k)
    value, witness = stability.delta_eps_stab(g, args.delta, args.eps, args.mu)
    record = {"kind": "delta-eps", "mu": args.mu, "delta": args.delta, "eps": args.eps,
              "value": value, "rho": witness.tolist()}
    if stability.is_symmetric(g) and not g.is_constant():
        star = stability.rho_star_bracket(g, args.delta, args.eps, args.mu)
        record.update(rho_star=star.rho_star, lo=star.lo, hi=star.hi)
    return record, True


def cmd_junta(args):
    f = _function("--f", args.f, args.n)
    D = _distribution("--dist", args.dist, f.n)
    rows = []
    if args.r is not None:
        best = junta.optimal_junta(f, D, args.r)
        rows.append({"r": args.r, "advantage": best.advantage, "error": best.error,
                     "coords": best.coord_list})
    else:
        curve = junta.advantage_curve(f, D)
        for r in range(f.n + 1):
            rows.append({"r": r, "advantage": curve[r], "error": curve.error(r),
                         "coords": bits_of(curve.coords[r])})
    record = {"n": f.n, "rows": rows}
    if args.eps is not None:
        curve = junta.advantage_curve(f, D)
        record["junta_complexity"] = junta.junta_complexity(curve, args.eps)
    return record, True


def cmd_compose(args):
    f = _function("--f", args.f, args.n)
    D = _distribution("--dist", args.dist, f.n)
    if args.check == "xorbound":
        bound = composition.xor_error_bound(f, D, args.budget, args.k)
        return {"check": "xorbound", "k": args.k, "budget": args.budget, "bound": bound}, True
    g = _function("--g", args.g, args.k)
    inst = composition.ComposedInstance(g, f, D)
    exhaustive = inst.n * inst.k <= 14
    if args.check == "sandwich":
        report = composition.sandwich_check(inst, args.budget, exhaustive)
    else:
        report = composition.error4_check(inst, args.budget, exhaustive)
    record = {"check": args.check, "mu": inst.mu, "budget": args.budget, **report.to_json()}
    if not exhaustive:
        record["note"] = "composed arity above 14: optimal R-junta not computed"
    return record, report.bounds_ok


def cmd_boost(args):
    if args.tolerant_eps is not None:
        plan = boosting.tolerant_boost_params(args.tolerant_eps, args.r, args.lam)
        return {
            "mode": "tolerant-plan",
            "k": plan.k,
            "k_adjusted": plan.k_adjusted,
            "composed": vars(plan.composed),
            "outer": vars(plan.outer),
            "outer_r_prime_real": plan.outer_r_prime_real,
            "outer_eps_no_real": plan.outer_eps_no_real,
        }, True
    f = _function("--f", args.f, args.n)
    if not isinstance(f, TruthTable):
        raise UsageError("--f must be deterministic for the boosted brute-force tester")
    D = _distribution("--dist", args.dist, f.n)
    composed, outer = boosting.zero_error_boost_params(args.eps_small, args.k, args.lam, args.r, args.r_prime)
    weak = boosting.brute_force_tester(composed)
    tester = boosting.boost(weak, args.k)
    oracle = boosting.OracleAccess(f, D, np.random.default_rng(args.seed))
    verdict = boosting.run_tester(tester, oracle)
    dist_r = junta.optimal_junta(f, D, outer.r).error
    dist_rp = junta.optimal_junta(f, D, outer.r_prime).error
    ok = oracle.query_count == args.k * tester.composed_queries
    truth = None
    if dist_r <= outer.eps_yes:
        truth = True
    elif dist_rp > outer.eps_no:
        truth = False
    if truth is not None:
        ok = ok and verdict == truth
    return {
        "mode": "zero-error",
        "verdict": "yes" if verdict else "no",
        "expected": None if truth is None else ("yes" if truth else "no"),
        "k": args.k,
        "eps_large": boosting.eps_large(args.eps_small, args.k, args.lam),
        "composed": vars(composed),
        "outer": vars(outer),
        "composed_queries": tester.composed_queries,
        "inner_queries": oracle.query_count,
        "distance_r": dist_r,
        "distance_r_prime": dist_rp,
    }, ok


def cmd_reduce(args):
    path = Path(args.instance)
    if not path.is_file():
        raise UsageError(f"--instance: cannot read {args.instance!r}")
    try:
        inst = boosting.SetCoverInstance.from_text(path.read_text())
    except ValueError as exc:
        raise UsageError(f"--instance {args.instance}: {exc}") from None
    f, D = boosting.setcover_reduce(inst)
    cover = boosting.min_set_cover(inst)
    record = {"m": inst.m, "n": inst.n, "min_cover": [i + 1 for i in cover],
              "support": [int(i) for i in np.flatnonzero(D.weights)],
              "weights": [float(w) for w in D.weights[D.weights > 0]]}
    ok = True
    if args.r is not None:
        err = junta.optimal_junta(f, D, args.r).error
        floor = 1.0 / (inst.m + 1)
        has_cover = len(cover) <= args.r
        holds = err == 0 if has_cover else err >= floor - 1e-12
        record.update(r=args.r, has_cover=has_cover, optimal_error=err, floor=floor, guarantee_holds=holds)
        ok = bool(holds)
    if args.write_table:
        Path(args.write_table).write_text(f.to_text())
    if args.write_dist:
        Path(args.write_dist).write_text(D.to_text())
    return record, ok


def cmd_counterexample(args):
    if args.which == "1":
        report = experiments.counterexample_majority_parity(args.k or 3, args.n or 3)
    elif args.which == "2":
        report = experiments.counterexample_random_and(args.n or 12, args.k or 5, args.seed, args.sampler)
    else:
        report = experiments.counterexample_noncomposed()
    payload = report.to_json()
    payload.update(payload.pop("quantities"))
    return payload, report.passed, report.to_text()


# ---------------------------------------------------------------- parser


def _common(p):
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--output", help="write the report here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="junta-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stab", help="multivariate noise stability",
                       description="Noise stability of g under the mu-biased product law. "
                       "Methods: fourier (spectral sum), sampled (Monte Carlo), xor (closed "
                       "form for parity), unbal (unbalanced stability with stay-probabilities "
                       "a, b), amgm (AM/GM bounds for symmetric g), delta-eps (largest "
                       "stability with a delta fraction of coordinates at correlation 1 - 2 eps, "
                       "plus the bracketed rho* for symmetric g).")
    p.add_argument("--g", default="xor", help="maj, xor, and, or, dict:i, thresh:t or a table file")
    p.add_argument("--k", type=int, help="arity of g (default: length of --rho; required for unbal and delta-eps)")
    p.add_argument("--mu", type=float, default=0.0, help="bias in (-1, 1)")
    p.add_argument("--rho", help="comma-separated correlations, each in [0, 1] (not used by unbal and delta-eps)")
    p.add_argument("--method", choices=("fourier", "sampled", "xor", "unbal", "amgm", "delta-eps"),
                   default="fourier")
    p.add_argument("--delta", type=float, help="fraction of noisy coordinates, in [0, 1]")
    p.add_argument("--eps", type=float, help="noise rate in [0, 1/2]")
    p.add_argument("--samples", type=int, default=100000, help="Monte Carlo sample count")
    p.add_argument("--h", help="second function for unbal (default g)")
    p.add_argument("--a", type=float, default=0.5, help="stay-probability of -1 inputs, in [0, 1]")
    p.add_argument("--b", type=float, default=0.5, help="stay-probability of +1 inputs, in [0, 1]")
    _common(p)
    p.set_defaults(run=cmd_stab)

    p = sub.add_parser("junta", help="optimal junta approximation",
                       description="Exact best r-junta under a distribution; without --r "
                       "prints the whole advantage curve r = 0..n.")
    p.add_argument("--f", required=True, help="named function or table/probability file")
    p.add_argument("--n", type=int, help="arity for named functions")
    p.add_argument("--dist", default="uniform", help="'uniform' or a distribution file")
    p.add_argument("--r", type=int, help="budget (>= 0)")
    p.add_argument("--eps", type=float, help="also report the smallest r reaching this error")
    _common(p)
    p.set_defaults(run=cmd_junta)

    p = sub.add_parser("compose", help="composition bounds for g o f",
                       description="Checks the composition sandwich (Stab lower bound, best "
                       "canonical form, optimal R-junta, sqrt Stab upper bound), the factor-4 "
                       "error relation, or the XOR error lower bound.")
    p.add_argument("--g", default="xor", help="outer function on k bits")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--budget", type=int, required=True, help="total junta budget R >= 0")
    p.add_argument("--check", choices=("sandwich", "error4", "xorbound"), default="sandwich")
    _common(p)
    p.set_defaults(run=cmd_compose)

    p = sub.add_parser("boost", help="boosted junta tester",
                       description="Runs a brute-force weak tester on XOR_k o f through the "
                       "boosting wrapper and audits the query count; with --tolerant-eps "
                       "prints the tolerant boosting plan instead.")
    p.add_argument("--f", default="dict:1")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5, help="strength in (0, 1)")
    p.add_argument("--eps-small", type=float, default=0.05, help="target distance in [0, 1/2]")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--r-prime", type=int, default=1)
    p.add_argument("--tolerant-eps", type=float, help="plan the tolerant booster for eps in (0, 1/16]")
    _common(p)
    p.set_defaults(run=cmd_boost)

    p = sub.add_parser("reduce-setcover", help="SetCover to junta testing",
                       description="Builds OR_n and the uniform law on the m + 1 reduction "
                       "points from a SetCover file ('m n' then one line of 1-based elements "
                       "per set) and checks the cover/junta-error correspondence.")
    p.add_argument("--instance", required=True)
    p.add_argument("--r", type=int, help="budget to check")
    p.add_argument("--write-table", help="save the OR table here")
    p.add_argument("--write-dist", help="save the distribution here")
    _common(p)
    p.set_defaults(run=cmd_reduce)

    p = sub.add_parser("counterexample", help="counterexamples to natural conjectures",
                       description="1: majority of parities (odd k, n >= k). "
                       "2: AND of a skewed function (n <= 16). "
                       "3: no composed form is optimal (fixed instance).")
    p.add_argument("which", choices=("1", "2", "3"))
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--sampler", choices=("parity-pair", "iid"), default="parity-pair")
    _common(p)
    p.set_defaults(run=cmd_counterexample)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.run(args)
    except (UsageError, ValueError, TypeError, JuntaLabError, OSError, AssertionError, RuntimeError) as exc:
        if isinstance(exc, (BoundViolation, ProtocolViolation)):
            print(f"junta-lab {args.command}: check failed: {exc}", file=sys.stderr)
            return 1
        print(f"junta-lab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    record, ok = result[0], result[1]
    text = result[2] if len(result) > 2 and args.format == "text" else None
    _emit(args, {"command": args.command, **record, "ok": bool(ok)}, text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
