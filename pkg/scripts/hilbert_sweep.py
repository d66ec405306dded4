#!/usr/bin/env python3
"""Relative error and error constants against rank for the Hilbert-type tensor."""
import argparse
import logging

from hoid.bench import ExperimentConfig, TensorSpec, run_sweep, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=20)
    ap.add_argument("--r-max", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repetitions", type=int, default=1)
    ap.add_argument("-o", "--output", default="hilbert_sweep.csv")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO)

    cfg = ExperimentConfig(
        tensor=TensorSpec("hilbert", {"N": args.N, "d": 3}),
        r_max=args.r_max,
        seed=args.seed,
        repetitions=args.repetitions,
        output=args.output,
    )
    rows = run_sweep(cfg)
    write_csv(rows, cfg.output)
    for r in rows:
        if r.rank == cfg.r_max:
            print(f"{r.method:8s} {r.selector:16s} rank {r.rank:2d}  rel_error {r.rel_error:.3e}")
    print(f"wrote {len(rows)} rows to {cfg.output}")


if __name__ == "__main__":
    main()
