"""Command-line entry point: ``polyrelease {sanitize,query,audit,approx,plan}``."""

from __future__ import annotations

import argparse
import json
import sys

from .approx import (
    construct_dl_helper,
    construct_or_approximant,
    construct_threshold_approximant,
)
from .errors import ReleaseError
from .explicit import construct_threshold_explicit
from .families import make_family, norm_bound
from .dataio import parse_bits_csv, parse_declists
from .harness import accuracy_trials, audit
from .sanitizer import (
    PrivacyBudget,
    answer,
    load_summary,
    min_database_size,
    sanitize,
    save_summary,
)

MC_SLACK = 0.05


class UsageError(Exception):
    pass


def _family_args(p: argparse.ArgumentParser, need_m: bool = False):
    p.add_argument("--family", required=True, choices=("disj", "rofk", "declist"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--m", type=int, required=need_m,
                   help="decision-list variables, or record width for disj/rofk")
    p.add_argument("--gamma", type=float, required=True)


def _budget_args(p: argparse.ArgumentParser):
    p.add_argument("--eps", type=float, required=True, help="epsilon; 'inf' disables noise")
    p.add_argument("--delta", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyrelease",
        description="Differentially private release of low-degree polynomial summaries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sanitize", help="release a noisy summary of a dataset")
    _family_args(p)
    _budget_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)

    p = sub.add_parser("query", help="answer one query from a summary")
    p.add_argument("--summary", required=True)
    p.add_argument("--y", required=True, help="query index as a bitstring, e.g. 01010")
    p.add_argument("--clamp", action="store_true")

    p = sub.add_parser("audit", help="compare a summary with exact answers (not private)")
    p.add_argument("--summary", required=True)
    p.add_argument("--input", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--sample", type=int, metavar="N")
    p.add_argument("--runs", type=int, default=1,
                   help="re-sanitize R times with fresh seeds and report the pass rate")
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("approx", help="construct and print a univariate approximant")
    p.add_argument("target", choices=("or", "threshold", "dl-helper"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--explicit", action="store_true",
                   help="threshold only: use the explicit Chebyshev pipeline")

    p = sub.add_parser("plan", help="smallest database size reaching a target accuracy")
    _family_args(p, need_m=True)
    _budget_args(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    return parser


def _check_family_flags(args):
    if args.family == "rofk" and args.r is None:
        raise UsageError("--r is required with --family rofk")
    if args.family != "rofk" and args.r is not None:
        raise UsageError(f"--r is only valid with --family rofk, not {args.family}")
    if args.family == "declist" and args.m is None:
        raise UsageError("--m is required with --family declist")


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_database(kind: str, path: str, m=None, k=None):
    text = _read(path)
    try:
        if kind == "declist":
            return parse_declists(text, m=m, k=k)
        return parse_bits_csv(text)
    except ReleaseError as exc:
        raise ReleaseError(f"{path}: {exc}") from None


def _budget(args) -> PrivacyBudget:
    return PrivacyBudget(args.eps, args.delta)


def cmd_sanitize(args, out):
    _check_family_flags(args)
    db = _load_database(args.family, args.input, m=args.m, k=args.k)
    if args.family == "declist":
        m = args.m
    else:
        m = db.shape[1]
        if args.m is not None and args.m != m:
            raise ReleaseError(f"--m {args.m} does not match the input width {m}")
    family = make_family(args.family, k=args.k, gamma=args.gamma, m=m, r=args.r)
    summary = sanitize(family, db, _budget(args), seed=args.seed)
    save_summary(summary, args.output)
    print(f"wrote {args.output}: t={family.t}, T={family.T!r}, "
          f"coefficients={family.space.size}, noise_scale={summary.noise_scale!r}", file=out)
    return 0


def cmd_query(args, out):
    summary = load_summary(args.summary)
    y = args.y.strip()
    if len(y) != summary.family.m or set(y) - {"0", "1"}:
        raise ReleaseError(f"--y must be a bitstring of length {summary.family.m}, got {args.y!r}")
    print(repr(answer(summary, [int(c) for c in y], clamp=args.clamp)), file=out)
    return 0


def cmd_audit(args, out):
    summary = load_summary(args.summary)
    fam = summary.family
    db = _load_database(fam.kind, args.input, m=fam.m, k=fam.k)
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    if args.runs == 1:
        report = audit(summary, db, beta=args.beta, sample=args.sample, seed=args.seed)
        out.write(report.to_text())
        return 0 if report.passed else 1
    family = make_family(fam.kind, k=fam.k, gamma=fam.gamma, m=fam.m, r=fam.r)
    if family.t != fam.t or family.T != fam.T:
        raise ReleaseError("rebuilt family does not reproduce the summary's t and T")
    first = summary.seed if summary.seed is not None else args.seed
    trials = accuracy_trials(family, db, summary.budget, args.beta, args.runs, seed=first)
    required = 1 - args.beta - MC_SLACK
    doc = {
        "runs": args.runs,
        "theorem_alpha": trials.alpha,
        "pass_rate": trials.pass_rate,
        "required_rate": required,
        "max_abs_error_worst_run": float(trials.max_errors.max()),
        "pass": trials.pass_rate >= required,
        "note": trials.reports[0].note,
    }
    out.write(json.dumps(doc, indent=2) + "\n")
    return 0 if doc["pass"] else 1


def cmd_approx(args, out):
    if args.target == "threshold" and args.r is None:
        raise UsageError("--r is required for the threshold target")
    if args.target != "threshold" and args.r is not None:
        raise UsageError(f"--r is only valid for the threshold target, not {args.target}")
    if args.explicit and args.target != "threshold":
        raise UsageError("--explicit applies to the threshold target only")
    if args.target == "or":
        a = construct_or_approximant(args.k, args.gamma)
        bound = norm_bound("disj", args.k, a)
    elif args.target == "threshold":
        build = construct_threshold_explicit if args.explicit else construct_threshold_approximant
        a = build(args.r, args.k, args.gamma)
        bound = norm_bound("rofk", args.k, a)
    else:
        a = construct_dl_helper(args.k, args.gamma)
        bound = norm_bound("declist", args.k, a)
    doc = {
        "target": args.target,
        "k": args.k,
        "degree": a.degree,
        "coefficients": [float(c) for c in a.poly.coeffs],
        "achieved_error": a.gamma,
        "certified_norm_bound": bound,
    }
    if "path" in a.info:
        doc["path"] = a.info["path"]
        doc["float64_error"] = a.info["float64_error"]
    out.write(json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_plan(args, out):
    _check_family_flags(args)
    family = make_family(args.family, k=args.k, gamma=args.gamma, m=args.m, r=args.r)
    n = min_database_size(family, _budget(args), args.alpha, args.beta)
    print(n, file=out)
    return 0


COMMANDS = {
    "sanitize": cmd_sanitize,
    "query": cmd_query,
    "audit": cmd_audit,
    "approx": cmd_approx,
    "plan": cmd_plan,
}


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        parser.print_usage(err)
        print(f"polyrelease {args.command}: error: {exc}", file=err)
        return 2
    except (ReleaseError, ValueError, OSError) as exc:
        print(f"polyrelease {args.command}: error: {exc}", file=err)
        return 1


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
