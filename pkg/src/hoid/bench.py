"""Rank sweeps over methods and selectors, with CSV output."""
from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import bounds as _bounds
from .decomp import convert_to_hoid, hoid, hosvd, relative_error, st_hoid
from .dten import read_tensor
from .generators import DEFAULT_CAP, gen_heat3, gen_heat5, gen_hilbert, gen_sparse_cp
from .tensor import frobenius_norm

log = logging.getLogger(__name__)

CSV_HEADER = (
    "tensor",
    "method",
    "selector",
    "rank",
    "rel_error",
    "bound",
    "max_error_constant",
    "wall_time_s",
    "seed",
)

METHOD_SELECTORS = {
    "hosvd": ("",),
    "hoid": ("rrqr", "pqr", "randomized"),
    "st-hoid": ("rrqr",),
    "convert": ("deim", "pqr", "rrqr", "simple-leverage"),
}
RANDOMIZED = {("hoid", "randomized"), ("convert", "simple-leverage")}
ALL_METHODS = (
    "hosvd",
    "hoid-rrqr",
    "hoid-pqr",
    "hoid-randomized",
    "st-hoid",
    "convert-deim",
    "convert-pqr",
    "convert-rrqr",
    "convert-simple-leverage",
)


class ConfigError(ValueError):
    pass


@dataclass
class TensorSpec:
    kind: str = "hilbert"
    params: dict = field(default_factory=dict)
    seed: int | None = None

    @property
    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({inner})" if inner else self.kind


@dataclass
class ExperimentConfig:
    tensor: TensorSpec = field(default_factory=TensorSpec)
    methods: tuple = ALL_METHODS
    selectors: tuple | None = None
    r_min: int = 1
    r_max: int = 10
    f: float = 1.0
    p: int = 10
    repetitions: int = 1
    seed: int | None = None
    output: str | None = None


@dataclass
class ResultRow:
    tensor: str
    method: str
    selector: str
    rank: int
    rel_error: float
    bound: float
    max_error_constant: float
    wall_time_s: float
    seed: int | None
    repetition: int = 0
    status: str = "ok"


def make_tensor(spec: TensorSpec) -> np.ndarray:
    prm = dict(spec.params)
    cap = int(prm.pop("cap", DEFAULT_CAP))
    if spec.kind == "hilbert":
        return gen_hilbert(int(prm.get("N", 20)), int(prm.get("d", 3)), cap)
    if spec.kind == "sparse-cp":
        if spec.seed is None:
            raise ConfigError("sparse-cp tensors need a seed")
        return gen_sparse_cp(int(prm.get("n", 50)), spec.seed, cap=cap)[0]
    if spec.kind in ("heat3", "heat5"):
        gen = gen_heat3 if spec.kind == "heat3" else gen_heat5
        return gen(int(prm.get("ns", 6)), int(prm.get("nr", 6)), int(prm.get("nt", 10)), cap)
    if spec.kind == "file":
        return read_tensor(prm["path"])
    raise ConfigError(f"unknown tensor kind {spec.kind!r}")


def expand_methods(methods, selectors=None):
    """``(method, selector)`` pairs from tokens like ``hoid`` or ``hoid-rrqr``."""
    pairs = []
    for token in methods:
        if token in METHOD_SELECTORS:
            method, chosen = token, METHOD_SELECTORS[token]
            if selectors is not None and token not in ("hosvd", "st-hoid"):
                chosen = tuple(s for s in chosen if s in selectors)
        else:
            method, _, sel = token.partition("-")
            if method not in METHOD_SELECTORS or sel not in METHOD_SELECTORS[method]:
                raise ConfigError(f"unknown method {token!r}")
            chosen = (sel,)
        for sel in chosen:
            if (method, sel) not in pairs:
                pairs.append((method, sel))
    return pairs


def validate(cfg: ExperimentConfig, dims) -> list:
    if cfg.repetitions < 1:
        raise ConfigError("repetitions must be >= 1")
    if cfg.r_min < 1:
        raise ConfigError(f"rank {cfg.r_min} is invalid; ranks start at 1")
    if cfg.r_max < cfg.r_min:
        raise ConfigError(f"empty rank range {cfg.r_min}..{cfg.r_max}")
    if cfg.r_max > min(dims):
        raise ConfigError(f"rank {cfg.r_max} exceeds the smallest dimension of {tuple(dims)}")
    if cfg.f < 1:
        raise ConfigError("f must be >= 1")
    pairs = expand_methods(cfg.methods, cfg.selectors)
    if any(pair in RANDOMIZED for pair in pairs) and cfg.seed is None:
        raise ConfigError("randomized methods need --seed")
    return pairs


def run_one(X, method, selector, rank, f=1.0, p=10, seed=None, xnorm=None):
    """Run one method at rank ``(rank, ..., rank)``.

    Returns ``(rel_error, relative bound, max error constant, wall time)``.
    """
    ranks = (rank,) * X.ndim
    xnorm = frobenius_norm(X) if xnorm is None else xnorm
    t0 = time.perf_counter()
    if method == "hosvd":
        T = hosvd(X, ranks)
        wall = time.perf_counter() - t0
        rel = relative_error(X, T)
        bound = math.sqrt(float(np.sum(_bounds.mode_tails(X, ranks))))
        return rel, bound / xnorm, float("nan"), wall
    if method == "hoid":
        _, rep = hoid(X, ranks, selector, f, p, seed)
    elif method == "st-hoid":
        _, rep = st_hoid(X, ranks, f=f)
    elif method == "convert":
        tucker = hosvd(X, ranks)
        _, rep = convert_to_hoid(X, tucker, selector, f, seed)
    else:
        raise ConfigError(f"unknown method {method!r}")
    wall = time.perf_counter() - t0
    return rep.rel_error, rep.bound / xnorm, rep.max_error_constant, wall


def run_sweep(cfg: ExperimentConfig, X=None) -> list:
    """One row per (method, selector, rank, repetition), sorted in that order.

    Randomized methods use ``seed + repetition``. A failing row is kept with
    NaN values and its exception text in ``status``.
    """
    if X is None:
        X = make_tensor(cfg.tensor)
    pairs = validate(cfg, X.shape)
    xnorm = frobenius_norm(X)
    rows = []
    for method, selector in pairs:
        randomized = (method, selector) in RANDOMIZED
        for rank in range(cfg.r_min, cfg.r_max + 1):
            for rep in range(cfg.repetitions):
                seed = cfg.seed + rep if randomized else None
                try:
                    rel, bound, const, wall = run_one(X, method, selector, rank, cfg.f, cfg.p, seed, xnorm)
                    status = "ok"
                except Exception as exc:  # noqa: BLE001 - recorded per row
                    log.warning("%s/%s rank %d failed: %s", method, selector, rank, exc)
                    rel = bound = const = wall = float("nan")
                    status = f"error: {exc}"
                rows.append(
                    ResultRow(cfg.tensor.label, method, selector, rank, rel, bound, const, wall, seed, rep, status)
                )
    order = {pair: i for i, pair in enumerate(pairs)}
    rows.sort(key=lambda r: (order[(r.method, r.selector)], r.rank, r.repetition))
    return rows


def format_value(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([format_value(getattr(r, name)) for name in CSV_HEADER])


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return list(reader)
