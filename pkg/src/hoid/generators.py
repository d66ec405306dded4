"""Test tensors: the Hilbert-type kernel tensor, a sparse nonnegative CP sum and
heat-kernel source/receiver/time data. Every generator is a pure function of
its arguments."""
from __future__ import annotations

import math

import numpy as np

from .tensor import CpDecomp, cp_to_full

DEFAULT_CAP = 10**8


def _check_size(dims, cap):
    total = math.prod(int(i) for i in dims)
    if total > cap:
        raise ValueError(f"tensor of shape {tuple(dims)} has {total} entries, above the cap of {cap}")


def gen_hilbert(N: int, d: int = 3, cap: int = DEFAULT_CAP) -> np.ndarray:
    """``X[i_1, ..., i_d] = 1 / sqrt(i_1^2 + ... + i_d^2)`` with 1-based ``i``."""
    if N < 1 or d < 2:
        raise ValueError(f"need N >= 1 and d >= 2, got N={N}, d={d}")
    _check_size((N,) * d, cap)
    i2 = np.arange(1, N + 1, dtype=np.int64) ** 2
    total = np.zeros((N,) * d, dtype=np.int64)
    for n in range(d):
        shape = [1] * d
        shape[n] = N
        total = total + i2.reshape(shape)
    return 1.0 / np.sqrt(total.astype(np.float64))


def sparse_cp_weights(n: int) -> np.ndarray:
    j = np.arange(1, n + 1, dtype=np.float64)
    return np.where(j <= 10, 1000.0 / j, 1.0 / j)


def gen_sparse_cp(n: int, seed: int, density: float = 0.1, cap: int = DEFAULT_CAP):
    """Order-3 CP sum with weights ``1000/j`` (``j <= 10``) and ``1/j`` after.

    Each factor vector has ``ceil(density * n)`` nonzeros at distinct random
    positions with values uniform on ``(0, 1]``. Vectors are drawn in the
    order ``x_1, y_1, z_1, x_2, ...`` from ``PCG64(seed)``.
    Returns ``(tensor, cp)``.
    """
    if n < 11:
        raise ValueError(f"need n >= 11, got {n}")
    _check_size((n, n, n), cap)
    rng = np.random.Generator(np.random.PCG64(seed))
    nnz = math.ceil(density * n)
    factors = np.zeros((3, n, n))
    for j in range(n):
        for m in range(3):
            pos = rng.choice(n, size=nnz, replace=False)
            factors[m, pos, j] = 1.0 - rng.random(nnz)
    cp = CpDecomp(sparse_cp_weights(n), tuple(factors))
    return cp_to_full(cp), cp


def _grid(side):
    return np.linspace(-1.0, 1.0, side)


def _times(nt):
    return np.linspace(0.1, 1.1, nt)


def _heat(r2, t):
    # sources sit at z = 2, receivers at z = 0
    return (4.0 * np.pi * t) ** -1.5 * np.exp(-(r2 + 4.0) / (4.0 * t))


def gen_heat3(ns_side: int = 6, nr_side: int = 6, nt: int = 10, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Heat-kernel data of shape ``(ns_side^2, nr_side^2, nt)``.

    Planar positions are flattened with the x index varying fastest, so
    ``gen_heat5`` is the column-major reshape of this tensor.
    """
    if min(ns_side, nr_side, nt) < 1:
        raise ValueError("grid sides and time count must be positive")
    _check_size((ns_side**2, nr_side**2, nt), cap)
    gs, gr = _grid(ns_side), _grid(nr_side)
    sx, sy = np.tile(gs, ns_side), np.repeat(gs, ns_side)
    rx, ry = np.tile(gr, nr_side), np.repeat(gr, nr_side)
    dx2 = (sx[:, None] - rx[None, :]) ** 2
    dy2 = (sy[:, None] - ry[None, :]) ** 2
    return _heat((dx2 + dy2)[:, :, None], _times(nt)[None, None, :])


def gen_heat5(ns_side: int = 6, nr_side: int = 6, nt: int = 10, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Heat-kernel data of shape ``(ns_side, ns_side, nr_side, nr_side, nt)``."""
    if min(ns_side, nr_side, nt) < 1:
        raise ValueError("grid sides and time count must be positive")
    _check_size((ns_side, ns_side, nr_side, nr_side, nt), cap)
    gs, gr = _grid(ns_side), _grid(nr_side)
    dx2 = (gs[:, None, None, None] - gr[None, None, :, None]) ** 2
    dy2 = (gs[None, :, None, None] - gr[None, None, None, :]) ** 2
    return _heat((dx2 + dy2)[..., None], _times(nt)[None, None, None, None, :])
