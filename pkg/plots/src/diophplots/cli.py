"""Command-line figure rendering: plots <kind> --in PATH [--in2 PATH] --out PATH."""

from __future__ import annotations

import argparse
import sys

from .figures import SchemaError, plot_clt_hist, plot_lk, plot_qq, plot_xi_decay

_KINDS = ("lk_line", "clt_hist", "qq", "xi_decay")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots", description="render report figures from experiment CSV tables")
    parser.add_argument("kind", choices=_KINDS)
    parser.add_argument("--in", dest="input", required=True, metavar="PATH")
    parser.add_argument("--in2", dest="input2", metavar="PATH",
                        help="second input (clt_hist: the summary table)")
    parser.add_argument("--out", required=True, metavar="PATH")
    args = parser.parse_args(argv)

    try:
        if args.kind == "lk_line":
            info = plot_lk(args.input, args.out)
        elif args.kind == "clt_hist":
            if not args.input2:
                parser.error("clt_hist requires --in2 with the summary table")
            info = plot_clt_hist(args.input, args.input2, args.out)
        elif args.kind == "qq":
            info = plot_qq(args.input, args.out)
        else:
            info = plot_xi_decay(args.input, args.out)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {info.path}  {info.labels}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
