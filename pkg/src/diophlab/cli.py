"""Command-line front end for the experiment runners and single-target queries."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .bestapprox import TargetMatrix, cf_expand, enumerate_best_approximations
from .norms import EUCLIDEAN, SUP, ProductNormSpec
from .runner import load_config, run_clt, run_correspondence, run_lk, run_verify


def _norm_kind(flag: str) -> str:
    return {"sup": SUP, "euclid": EUCLIDEAN}[flag]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="config file (key = value lines)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="DIR", dest="output_dir")
    p.add_argument("--workers", type=int)
    p.add_argument("--dims", type=int, nargs=2, metavar=("M", "N"))
    p.add_argument("--norm", choices=["sup", "euclid"])
    p.add_argument("--sign", choices=["signed", "unsigned"], dest="sign_mode")
    p.add_argument("--samples", type=int)
    p.add_argument("--T-grid", dest="t_grid",
                   help="comma-separated rational cut-off exponents")


def _config_from_args(args) -> "ExperimentConfig":
    overrides = {
        "seed": args.seed,
        "output_dir": args.output_dir,
        "workers": args.workers,
        "sign_mode": args.sign_mode,
        "samples": args.samples,
    }
    if args.dims is not None:
        overrides["m"], overrides["n"] = args.dims
    if args.norm is not None:
        overrides["norm_m"] = overrides["norm_n"] = _norm_kind(args.norm)
    if getattr(args, "t_grid", None):
        overrides["T_grid"] = tuple(Fraction(x.strip()) for x in args.t_grid.split(","))
    return load_config(args.config, **overrides)


def _parse_theta(text: str) -> TargetMatrix:
    rows = [[Fraction(cell.strip()) for cell in row.split(",")]
            for row in text.split(";")]
    return TargetMatrix.from_rows(rows)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="diophlab",
        description="best-approximation counting, orbit counts, and their statistics")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, desc in (("lk", "counting table N(theta, T) over a sample ensemble"),
                       ("clt", "normalized deviations, normality battery, autocovariance"),
                       ("correspondence", "shell-by-shell identity check"),
                       ("verify", "exact-identity verification suite")):
        p = sub.add_parser(name, help=desc)
        _add_common(p)
        if name == "verify":
            p.add_argument("--corrupt-f", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("best-approx", help="print the best approximations of one target")
    p.add_argument("--theta", required=True,
                   help="rational matrix, rows ';'-separated, entries ','-separated")
    p.add_argument("--qmax", help="exact rational bound on ||q||")
    p.add_argument("--T", help="rational exponent; bound is e**T")
    p.add_argument("--norm", choices=["sup", "euclid"], default="sup")
    p.add_argument("--sign", choices=["signed", "unsigned"], default="signed")

    p = sub.add_parser("cf", help="print the continued fraction of one rational")
    p.add_argument("--theta", required=True, help="rational in [0, 1)")
    p.add_argument("--kmax", type=int, default=None)

    args = parser.parse_args(argv)

    if args.command == "best-approx":
        theta = _parse_theta(args.theta)
        if (args.qmax is None) == (args.T is None):
            parser.error("exactly one of --qmax and --T is required")
        kind = _norm_kind(args.norm)
        norms = ProductNormSpec.default(theta.m, theta.n, kind, kind)
        seq = enumerate_best_approximations(
            theta,
            T=None if args.T is None else Fraction(args.T),
            qmax=None if args.qmax is None else Fraction(args.qmax),
            norms=norms, sign_mode=args.sign)
        print(f"# theta = {args.theta}  ({theta.m}x{theta.n}, {args.norm} norms, "
              f"{args.sign}, {seq.truncation})")
        print("p,q,qnorm,err,shell")
        for rec in seq.records:
            p_str = " ".join(str(c) for c in rec.p)
            q_str = " ".join(str(c) for c in rec.q)
            print(f"({p_str}),({q_str}),{rec.qnorm.as_float():.6g},"
                  f"{rec.err.as_float():.6g},{rec.shell_index}")
        print(f"# count = {seq.count}" + (" (exhausted: exact hit)" if seq.exhausted_rational else ""))
        return 0

    if args.command == "cf":
        cf = cf_expand(Fraction(args.theta), args.kmax)
        print("quotients:", list(cf.quotients))
        print("convergents:", [f"{p}/{q}" for p, q in cf.convergents])
        print("exact:", cf.exact)
        return 0

    config = _config_from_args(args)
    if args.command == "lk":
        store = run_lk(config)
        print(f"wrote {store.dir}/lk.csv  summary={store.summary}")
        return 0
    if args.command == "clt":
        store = run_clt(config)
        print(f"wrote {store.dir}/deviations.csv  summary={store.summary}")
        return 0
    if args.command == "correspondence":
        store = run_correspondence(config)
        print(f"wrote {store.dir}/shells.csv  summary={store.summary}")
        return 0
    if args.command == "verify":
        status, store = run_verify(config, corrupt_f=args.corrupt_f)
        print(f"wrote {store.dir}/verify.csv  status={'PASS' if status == 0 else 'FAIL'}")
        return status
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
