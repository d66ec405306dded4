#!/usr/bin/env python3
"""Compression of the heat-kernel data tensors (order 3 and order 5)."""
import argparse

from hoid.bench import ExperimentConfig, TensorSpec, run_sweep, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", type=int, default=6)
    ap.add_argument("--nr", type=int, default=6)
    ap.add_argument("--nt", type=int, default=10)
    ap.add_argument("--order", type=int, choices=(3, 5), default=3)
    ap.add_argument("--r-max", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-o", "--output", default="heat_sweep.csv")
    args = ap.parse_args()

    spec = TensorSpec(f"heat{args.order}", {"ns": args.ns, "nr": args.nr, "nt": args.nt})
    methods = ("hosvd", "hoid-rrqr", "hoid-randomized", "st-hoid", "convert-rrqr")
    rows = run_sweep(ExperimentConfig(tensor=spec, methods=methods, r_max=args.r_max, seed=args.seed))
    write_csv(rows, args.output)
    print(f"wrote {len(rows)} rows to {args.output}")


if __name__ == "__main__":
    main()
