#!/usr/bin/env python3
"""Excess statistic of window counts against the density prediction.

Sweeps a grid of window positions and lengths, counts tuples exactly, and
reports max(0, count/(density*h) - 1) * h^(1/3 - excess_exponent(h)): the
scaled overshoot whose boundedness the upper-bound certificate predicts.
"""

import argparse
import sys

from sqfree.arith import as_offsets
from sqfree.cli import ExperimentConfig, COLUMNS, render, run_command


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--x", default="1_000_000,10_000_000,100_000_000",
                        help="comma-separated window starts")
    parser.add_argument("--h", default="1_000,10_000,100_000",
                        help="comma-separated window lengths")
    parser.add_argument("--offsets", action="append", default=None,
                        help="repeatable offset patterns (default: 0 and 0,1)")
    parser.add_argument("--prime-cutoff", type=int, default=10**7)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    parser.add_argument("--out", default=None)
    args = parser.parse_args(argv)

    patterns = args.offsets if args.offsets else ["0", "0,1"]
    cfg = ExperimentConfig(
        command="sweep",
        x_grid=tuple(int(v) for v in args.x.split(",")),
        h_grid=tuple(int(v) for v in args.h.split(",")),
        offsets_grid=tuple(as_offsets(int(p) for p in pat.split(",")) for pat in patterns),
        prime_cutoff=args.prime_cutoff,
        threads=args.threads,
        fmt=args.format,
        out=args.out,
    )
    text = render(run_command(cfg), COLUMNS["sweep"], args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
