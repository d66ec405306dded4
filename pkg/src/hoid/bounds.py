"""A priori error bounds for interpolatory tensor decompositions.

All functions are plain arithmetic on singular values, residual norms and
shapes; nothing here factorizes a tensor except :func:`mode_tails`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .tensor import unfold


def q_factor(n_cols: int, r: int, f: float = 1.0) -> float:
    """``1 + f^2 r (n_cols - r)`` for selecting ``r`` of ``n_cols`` columns."""
    return 1.0 + f * f * r * (n_cols - r)


def q_factors(dims: Sequence[int], ranks: Sequence[int], f: float = 1.0) -> np.ndarray:
    dims = [int(i) for i in dims]
    total = math.prod(dims)
    return np.array([q_factor(total // I, r, f) for I, r in zip(dims, ranks)])


def mode_spectra(X) -> list:
    return [sla.svdvals(unfold(X, n)) for n in range(np.ndim(X))]


def mode_tails(X, ranks) -> np.ndarray:
    """``sum_{k > r_n} sigma_k^2(X_(n))`` for each mode."""
    return np.array([float(np.sum(s[r:] ** 2)) for s, r in zip(mode_spectra(X), ranks)])


def hoid_bound(tails, q) -> float:
    """Squared-error bound for direct column selection on each unfolding."""
    return float(np.dot(q, tails))


def conversion_bound(eps, q) -> float:
    """Squared-error bound when columns come from an approximate SVD with
    per-mode residuals ``eps_n = ||X_(n) - A_n B_n^T||_F``."""
    return float(np.dot(q, np.asarray(eps) ** 2))


def sequential_bound(sq_norms, q) -> float:
    """Bound for sequential truncation.

    ``sq_norms[t]`` is ``||X^(t)||_F^2`` for the partially projected tensors,
    ``sq_norms[0] = ||X||_F^2``; ``q[t]`` belongs to the mode processed at step
    ``t``. Negative telescoping increments from rounding are clamped to zero.
    """
    sq_norms = np.asarray(sq_norms, dtype=np.float64)
    drops = np.maximum(sq_norms[:-1] - sq_norms[1:], 0.0)
    return float(np.dot(q, np.cumsum(drops)))


def cur_q(m: int, n: int, r: int, f: float = 1.0) -> float:
    return 2.0 + f * f * r * (m + n - 2 * r)


def cur_bound(sigma, m: int, n: int, r: int, f: float = 1.0) -> float:
    sigma = np.asarray(sigma, dtype=np.float64)
    return cur_q(m, n, r, f) * float(np.sum(sigma[r:] ** 2))


def per_mode_tolerances(eps: float, q) -> np.ndarray:
    """Per-mode truncation tolerances with ``eps_n^2 = eps^2 / (d q_n)``."""
    q = np.asarray(q, dtype=np.float64)
    return np.sqrt(eps * eps / (q.size * q))


def fast_decay_bound(spectra, ranks, q) -> float:
    """Leading-term form ``sum_n q_n sigma_{r_n + 1}^2``."""
    return float(sum(qn * _next_sigma(s, r) ** 2 for s, r, qn in zip(spectra, ranks, q)))


def slow_decay_bound(spectra, ranks, q, dims) -> float:
    """Worst-case form ``sum_n q_n (min(I_n, prod_{k != n} I_k) - r_n) sigma_{r_n + 1}^2``."""
    total = math.prod(int(i) for i in dims)
    out = 0.0
    for s, r, qn, I in zip(spectra, ranks, q, dims):
        out += qn * (min(I, total // I) - r) * _next_sigma(s, r) ** 2
    return float(out)


def _next_sigma(s, r):
    return float(s[r]) if r < len(s) else 0.0


@dataclass(frozen=True)
class BoundSummary:
    q_factors: np.ndarray
    hoid: float
    conversion: float | None
    sequential: float | None
    cur: float | None
    tolerances: np.ndarray | None
    fast_decay: float
    slow_decay: float


def bounds(X, ranks, f: float = 1.0, eps=None, sq_norms=None, target: float | None = None) -> BoundSummary:
    """Evaluate every applicable bound for tensor ``X`` at ``ranks``.

    ``eps`` (per-mode residuals) enables the conversion bound, ``sq_norms``
    (identity mode order) the sequential one and ``target`` the per-mode
    tolerances. The CUR form is filled in for matrices.
    """
    X = np.asarray(X, dtype=np.float64)
    dims = X.shape
    q = q_factors(dims, ranks, f)
    spectra = mode_spectra(X)
    tails = np.array([float(np.sum(s[r:] ** 2)) for s, r in zip(spectra, ranks)])
    cur = None
    if X.ndim == 2 and ranks[0] == ranks[1]:
        cur = cur_bound(spectra[0], dims[0], dims[1], ranks[0], f)
    return BoundSummary(
        q_factors=q,
        hoid=hoid_bound(tails, q),
        conversion=None if eps is None else conversion_bound(eps, q),
        sequential=None if sq_norms is None else sequential_bound(sq_norms, q),
        cur=cur,
        tolerances=None if target is None else per_mode_tolerances(target, q),
        fast_decay=fast_decay_bound(spectra, ranks, q),
        slow_decay=slow_decay_bound(spectra, ranks, q, dims),
    )
