"""cwplot coherence|registration --in <run dir> --out <file.svg> [--block <id>]"""

from __future__ import annotations

import argparse
import sys

from .plots import SchemaError, plot_coherence, plot_registration


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cwplot",
                                     description="figures from cwsim run outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_coh = sub.add_parser("coherence", help="log-scale coherence decay")
    p_reg = sub.add_parser("registration", help="P(m, t) heatmap")
    for p in (p_coh, p_reg):
        p.add_argument("--in", dest="run_dir", required=True)
        p.add_argument("--out", dest="out_path", required=True)
        p.add_argument("--block", default=None)
    p_reg.add_argument("--apparatus", type=int, default=0)

    args = parser.parse_args(argv)
    try:
        if args.command == "coherence":
            plot_coherence(args.run_dir, args.out_path, block=args.block)
        else:
            plot_registration(args.run_dir, args.out_path, block=args.block,
                              apparatus=args.apparatus)
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {args.out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
