"""``hoid-bench``: generate test tensors, decompose them, sweep ranks and check
error bounds from the command line.

Exit status is 0 on success, 2 when some sweep rows or bound checks fail and
1 on configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from . import bench
from .bench import ALL_METHODS, ConfigError, ExperimentConfig, TensorSpec
from .decomp import convert_to_hoid, hoid, hosvd, matrix_cur, relative_error, st_hoid
from .dten import DtenFormatError, write_tensor
from .tensor import frobenius_norm

log = logging.getLogger("hoid")

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2

DESK_SCALE = {"hilbert": {"N": 20}, "sparse-cp": {"n": 50}, "heat3": {"ns": 6, "nr": 6, "nt": 10}}
FULL_SCALE = {"hilbert": {"N": 50}, "sparse-cp": {"n": 50}, "heat3": {"ns": 20, "nr": 20, "nt": 20}}
DESK_SCALE["heat5"] = DESK_SCALE["heat3"]
FULL_SCALE["heat5"] = FULL_SCALE["heat3"]


def _add_tensor_args(p):
    g = p.add_argument_group("tensor")
    g.add_argument("--tensor", default="hilbert", choices=["hilbert", "sparse-cp", "heat3", "heat5"])
    g.add_argument("--input", help="read the tensor from a .dten file instead of generating it")
    g.add_argument("--N", type=int, help="Hilbert grid size")
    g.add_argument("--d", type=int, default=3, help="Hilbert tensor order")
    g.add_argument("--n", type=int, help="sparse CP size")
    g.add_argument("--ns", type=int, help="source grid side (heat)")
    g.add_argument("--nr", type=int, help="receiver grid side (heat)")
    g.add_argument("--nt", type=int, help="number of time samples (heat)")
    g.add_argument("--cap", type=int, default=10**8, help="maximum number of tensor entries")
    g.add_argument("--full-scale", action="store_true", help="use the large reference sizes")
    g.add_argument("--tensor-seed", type=int, help="seed for the sparse CP generator (defaults to --seed)")


def _tensor_spec(args) -> TensorSpec:
    if args.input:
        return TensorSpec("file", {"path": args.input})
    kind = args.tensor
    params = dict((FULL_SCALE if args.full_scale else DESK_SCALE)[kind])
    for name in ("N", "n", "ns", "nr", "nt"):
        value = getattr(args, name)
        if value is not None and name in params:
            params[name] = value
    if kind == "hilbert":
        params["d"] = args.d
    if args.cap != 10**8:
        params["cap"] = args.cap
    seed = args.tensor_seed if args.tensor_seed is not None else getattr(args, "seed", None)
    return TensorSpec(kind, params, seed if kind == "sparse-cp" else None)


def _load(args) -> tuple:
    spec = _tensor_spec(args)
    try:
        return spec, bench.make_tensor(spec)
    except (ValueError, OSError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def _parse_ranks(text, d):
    ranks = [int(t) for t in text.split(",") if t.strip()]
    if len(ranks) == 1:
        ranks = ranks * d
    if len(ranks) != d:
        raise ConfigError(f"need 1 or {d} ranks, got {len(ranks)}")
    return tuple(ranks)


def cmd_gen(args) -> int:
    spec, X = _load(args)
    write_tensor(args.output, X)
    print(f"wrote {spec.label} shape={X.shape} to {args.output}")
    return EXIT_OK


def _dump_indices(path, indices):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("mode", "position", "index"))
        for n, p in enumerate(indices):
            for pos, j in enumerate(p):
                w.writerow((n, pos, int(j)))


def cmd_decompose(args) -> int:
    spec, X = _load(args)
    ranks = _parse_ranks(args.ranks, X.ndim)
    method, selector = args.method, args.selector
    if (method, selector) in bench.RANDOMIZED and args.seed is None:
        raise ConfigError("randomized selection needs --seed")
    try:
        if method == "hosvd":
            T = hosvd(X, ranks)
            print(f"tensor={spec.label} method=hosvd ranks={ranks} rel_error={relative_error(X, T):.6e}")
            return EXIT_OK
        if method == "hoid":
            H, rep = hoid(X, ranks, selector, args.f, args.p, args.seed)
        elif method == "st-hoid":
            order = None if args.mode_order is None else [int(t) for t in args.mode_order.split(",")]
            H, rep = st_hoid(X, ranks, order, args.f)
        else:
            H, rep = convert_to_hoid(X, hosvd(X, ranks), selector, args.f, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    xnorm = frobenius_norm(X)
    print(
        f"tensor={spec.label} method={rep.kind} ranks={rep.ranks} rel_error={rep.rel_error:.6e} "
        f"bound={rep.bound / xnorm:.6e} max_error_constant={rep.max_error_constant:.6e} "
        f"wall_time_s={rep.wall_time_s:.4f}"
    )
    for note in rep.notes:
        print(f"note: {note}")
    if args.dump_indices:
        _dump_indices(args.dump_indices, H.indices)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = _tensor_spec(args)
    cfg = ExperimentConfig(
        tensor=spec,
        methods=tuple(args.methods.split(",")),
        selectors=None if args.selectors is None else tuple(args.selectors.split(",")),
        r_min=args.r_min,
        r_max=args.r_max,
        f=args.f,
        p=args.p,
        repetitions=args.repetitions,
        seed=args.seed,
        output=args.output,
    )
    try:
        X = bench.make_tensor(spec)
    except (ValueError, OSError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    rows = bench.run_sweep(cfg, X)
    if args.output:
        bench.write_csv(rows, args.output)
    else:
        w = csv.writer(sys.stdout)
        w.writerow(bench.CSV_HEADER)
        for r in rows:
            w.writerow([bench.format_value(getattr(r, name)) for name in bench.CSV_HEADER])
    failed = sum(r.status != "ok" for r in rows)
    if failed:
        log.error("%d of %d rows failed", failed, len(rows))
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_cur(args) -> int:
    if args.input:
        spec, A = _load(args)
    else:
        if args.seed is None:
            raise ConfigError("a random matrix needs --seed")
        rng = np.random.Generator(np.random.PCG64(args.seed))
        A = rng.standard_normal((args.rows, args.cols))
    if A.ndim != 2:
        raise ConfigError(f"CUR needs a matrix, got shape {A.shape}")
    if args.selector == "randomized" and args.seed is None:
        raise ConfigError("randomized selection needs --seed")
    try:
        C, U, R, rep = matrix_cur(A, args.rank, args.f, args.selector, args.p, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cols = ",".join(str(int(j)) for j in rep.indices[0])
    rows = ",".join(str(int(i)) for i in rep.indices[1])
    print(f"shape={A.shape} rank={args.rank} rel_error={rep.rel_error:.6e} bound={rep.bound / np.linalg.norm(A):.6e}")
    print(f"columns={cols}")
    print(f"rows={rows}")
    return EXIT_OK


def cmd_verify_bounds(args) -> int:
    spec, X = _load(args)
    ranks = _parse_ranks(args.ranks, X.ndim)
    checks = [
        ("hoid-rrqr", lambda: hoid(X, ranks, "rrqr", args.f)[1]),
        ("convert-rrqr", lambda: convert_to_hoid(X, hosvd(X, ranks), "rrqr", args.f)[1]),
        ("st-hoid", lambda: st_hoid(X, ranks, f=args.f)[1]),
    ]
    if X.ndim == 2:
        checks.append(("cur-rrqr", lambda: matrix_cur(X, ranks[0], args.f)[3]))
    failures = 0
    for name, run in checks:
        try:
            rep = run()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        ok = rep.bound_holds(args.slack)
        failures += not ok
        print(
            f"{'PASS' if ok else 'FAIL'} {name} {spec.label} ranks={rep.ranks} "
            f"abs_error^2={rep.abs_error**2:.6e} bound^2={rep.bound**2:.6e}"
        )
    return EXIT_PARTIAL if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hoid-bench", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a test tensor to a .dten file")
    _add_tensor_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("decompose", help="decompose one tensor and report the error")
    _add_tensor_args(p)
    p.add_argument("--method", default="hoid", choices=["hosvd", "hoid", "st-hoid", "convert"])
    p.add_argument("--selector", default="rrqr",
                   choices=["rrqr", "pqr", "randomized", "deim", "simple-leverage"])
    p.add_argument("--ranks", required=True, help="one rank for every mode, or a comma list")
    p.add_argument("--mode-order", help="processing order for st-hoid, comma separated")
    p.add_argument("--f", type=float, default=1.0)
    p.add_argument("--p", type=int, default=10, help="oversampling for randomized selection")
    p.add_argument("--seed", type=int)
    p.add_argument("--dump-indices", metavar="CSV", help="write the selected indices per mode")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("sweep", help="rank sweep over methods, written as CSV")
    _add_tensor_args(p)
    p.add_argument("--methods", default=",".join(ALL_METHODS))
    p.add_argument("--selectors")
    p.add_argument("--r-min", type=int, default=1)
    p.add_argument("--r-max", type=int, default=10)
    p.add_argument("--f", type=float, default=1.0)
    p.add_argument("--p", type=int, default=10)
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cur", help="CUR factorization of a matrix")
    _add_tensor_args(p)
    p.add_argument("--rows", type=int, default=20)
    p.add_argument("--cols", type=int, default=15)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--selector", default="rrqr", choices=["rrqr", "pqr", "randomized"])
    p.add_argument("--f", type=float, default=1.0)
    p.add_argument("--p", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_cur)

    p = sub.add_parser("verify-bounds", help="check measured errors against the a priori bounds")
    _add_tensor_args(p)
    p.add_argument("--ranks", required=True)
    p.add_argument("--f", type=float, default=1.0)
    p.add_argument("--slack", type=float, default=1e-6)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_verify_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DtenFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
