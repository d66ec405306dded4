"""Tucker-format decompositions whose factors are columns of the unfoldings.

The pipelines here are HOSVD, direct interpolatory decomposition (``hoid``),
conversion of an existing Tucker/CP/two-factor representation
(``convert_to_hoid``), the sequentially truncated variant (``st_hoid``) and
matrix CUR. Each interpolatory pipeline returns the decomposition together with
an :class:`ErrorReport` holding the measured error and the matching a priori
bound on the Frobenius error ``||E||_F``.
"""
from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bounds as _bounds
from .linalg import (
    RankDeficiencyWarning,
    interp_decomp,
    lowrank_svd_from_factors,
    pseudo_inverse,
    randomized_interp_decomp,
    thin_svd,
)
from .select import SingularSelectionError, error_constant, select_indices
from .tensor import (
    CpDecomp,
    TuckerDecomp,
    as_tensor,
    fold,
    frobenius_norm,
    lowrank_mode_factors,
    mode_multiply,
    multi_mode_multiply,
    unfold,
)

log = logging.getLogger(__name__)

DIRECT_SELECTORS = ("rrqr", "pqr", "randomized")
CONVERT_SELECTORS = ("rrqr", "pqr", "deim", "simple-leverage")


@dataclass(frozen=True)
class HoidDecomp:
    """``X ~= core x_1 C_1 ... x_d C_d`` with ``C_n = unfold(X, n)[:, indices[n]]``.

    ``core`` is ``None`` when the pipeline was asked to skip it.
    """

    core: np.ndarray | None
    columns: tuple
    indices: tuple

    @property
    def ranks(self):
        return tuple(len(p) for p in self.indices)


@dataclass
class ErrorReport:
    rel_error: float
    abs_error: float
    bound: float  # bound on abs_error, i.e. on ||E||_F
    q_factors: np.ndarray
    error_constants: np.ndarray | None = None
    wall_time_s: float = 0.0
    seed: int | None = None
    kind: str = ""
    requested_ranks: tuple = ()
    ranks: tuple = ()
    residuals: np.ndarray | None = None
    constant_bound: float | None = None
    notes: list = field(default_factory=list)
    indices: tuple = ()

    @property
    def rank_deficient(self) -> bool:
        return tuple(self.ranks) != tuple(self.requested_ranks)

    @property
    def max_error_constant(self) -> float:
        if self.error_constants is None or len(self.error_constants) == 0:
            return float("nan")
        return float(np.max(self.error_constants))

    def bound_holds(self, slack: float = 1e-6) -> bool:
        return self.abs_error**2 <= (1.0 + slack) * self.bound**2


def _check_ranks(X, ranks):
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != X.ndim:
        raise ValueError(f"need {X.ndim} ranks, got {len(ranks)}")
    for n, (r, I) in enumerate(zip(ranks, X.shape)):
        if not 1 <= r <= I:
            raise ValueError(f"rank {r} for mode {n} must lie in [1, {I}]")
    return ranks


def _mode_seeds(seed, d):
    if seed is None:
        return [None] * d
    return np.random.SeedSequence(seed).spawn(d)


def _other_size(dims, n):
    return math.prod(int(I) for k, I in enumerate(dims) if k != n)


def hosvd(X, ranks) -> TuckerDecomp:
    """Truncated higher-order SVD: leading left singular vectors per mode."""
    X = as_tensor(X)
    ranks = _check_ranks(X, ranks)
    factors = [thin_svd(unfold(X, n), r).U for n, r in enumerate(ranks)]
    core = multi_mode_multiply(X, [U.T for U in factors])
    return TuckerDecomp(core, factors)


def core_tensor(X, columns, tol: float = 1e-12) -> np.ndarray:
    """Frobenius-optimal core ``X x_1 C_1^+ ... x_d C_d^+``."""
    X = as_tensor(X)
    if len(columns) != X.ndim:
        raise ValueError(f"need {X.ndim} column matrices, got {len(columns)}")
    return multi_mode_multiply(X, [pseudo_inverse(C, tol) for C in columns])


def reconstruct(H: HoidDecomp) -> np.ndarray:
    if H.core is None:
        raise ValueError("decomposition was computed without a core tensor")
    return multi_mode_multiply(H.core, H.columns)


def relative_error(X, H) -> float:
    X = as_tensor(X)
    approx = reconstruct(H) if isinstance(H, HoidDecomp) else multi_mode_multiply(H.core, H.factors)
    nrm = frobenius_norm(X)
    err = frobenius_norm(X - approx)
    return err / nrm if nrm > 0 else err


def _finish(X, indices, with_core, core_tol):
    columns = tuple(unfold(X, n)[:, p] for n, p in enumerate(indices))
    core = core_tensor(X, columns, core_tol) if with_core else None
    H = HoidDecomp(core, columns, tuple(np.asarray(p, dtype=np.int64) for p in indices))
    if with_core:
        abs_err = frobenius_norm(X - reconstruct(H))
        nrm = frobenius_norm(X)
        rel = abs_err / nrm if nrm > 0 else abs_err
    else:
        abs_err = rel = float("nan")
    return H, abs_err, rel


def hoid(
    X,
    ranks,
    selector: str = "rrqr",
    f: float = 1.0,
    p: int = 10,
    seed: int | None = None,
    with_core: bool = True,
    core_tol: float = 1e-12,
    compute_bound: bool = True,
):
    """Interpolatory decomposition of every unfolding, then the optimal core.

    ``selector`` is ``"rrqr"`` (strong RRQR), ``"pqr"`` (greedy pivoted QR) or
    ``"randomized"`` (strong RRQR of a Gaussian sketch with oversampling
    ``p``; needs ``seed``). The reported bound is the square root of
    ``sum_n q_n sum_{k > r_n} sigma_k^2(X_(n))``, guaranteed for ``rrqr``.
    """
    X = as_tensor(X)
    ranks = _check_ranks(X, ranks)
    if selector not in DIRECT_SELECTORS:
        raise ValueError(f"unknown selector {selector!r}; choose from {DIRECT_SELECTORS}")
    if selector == "randomized" and seed is None:
        raise ValueError("the randomized selector needs a seed")
    t0 = time.perf_counter()
    seeds = _mode_seeds(seed, X.ndim)
    indices = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RankDeficiencyWarning)
        for n, r in enumerate(ranks):
            A = unfold(X, n)
            if selector == "randomized":
                dec = randomized_interp_decomp(A, r, p, f, seeds[n])
            else:
                dec = interp_decomp(A, r, f, strong=selector == "rrqr")
            indices.append(dec.indices)
    H, abs_err, rel = _finish(X, indices, with_core, core_tol)
    wall = time.perf_counter() - t0

    achieved = H.ranks
    q = _bounds.q_factors(X.shape, achieved, f)
    bound = math.sqrt(_bounds.hoid_bound(_bounds.mode_tails(X, achieved), q)) if compute_bound else float("nan")
    report = ErrorReport(
        rel_error=rel,
        abs_error=abs_err,
        bound=bound,
        q_factors=q,
        wall_time_s=wall,
        seed=seed,
        kind=f"hoid-{selector}",
        requested_ranks=ranks,
        ranks=achieved,
        notes=[str(w.message) for w in caught if issubclass(w.category, RankDeficiencyWarning)],
        indices=H.indices,
    )
    return H, report


def _mode_pairs(rep, d):
    if isinstance(rep, (TuckerDecomp, CpDecomp)):
        if len(rep.factors) != d:
            raise ValueError(f"representation has order {len(rep.factors)}, tensor has order {d}")
        return [lowrank_mode_factors(rep, n) for n in range(d)]
    pairs = list(rep)
    if len(pairs) != d:
        raise ValueError(f"need {d} (A_n, B_n) pairs, got {len(pairs)}")
    return [(np.asarray(A, dtype=np.float64), np.asarray(B, dtype=np.float64)) for A, B in pairs]


def _numerical_basis(svd, shape):
    S = svd.S
    if S.size == 0 or S[0] == 0.0:
        return svd.V[:, :0]
    keep = int(np.count_nonzero(S > np.finfo(np.float64).eps * max(shape) * S[0]))
    return svd.V[:, :keep]


def _select_with_fallback(V, selector, f, seed, notes, n):
    try:
        p = select_indices(V, selector, f, seed)
        return p, error_constant(V, p)
    except SingularSelectionError as exc:
        if selector == "rrqr":
            raise
        notes.append(f"mode {n}: {selector} selection singular ({exc}); retried with rrqr")
        log.warning("mode %d: %s selection singular, retrying with rrqr", n, selector)
        p = select_indices(V, "rrqr", f)
        return p, error_constant(V, p)


def convert_to_hoid(
    X,
    rep,
    selector: str = "rrqr",
    f: float = 1.0,
    seed: int | None = None,
    with_core: bool = True,
    core_tol: float = 1e-12,
):
    """Turn a low-rank representation of ``X`` into interpolatory form.

    ``rep`` is a :class:`TuckerDecomp`, a :class:`CpDecomp` or a sequence of
    per-mode pairs ``(A_n, B_n)`` with ``unfold(X, n) ~= A_n @ B_n.T``. Column
    indices are selected from the right singular vectors of ``A_n B_n^T``; the
    columns themselves are read from ``X``. The reported bound is
    ``sqrt(sum_n q_n eps_n^2)`` with ``eps_n = ||X_(n) - A_n B_n^T||_F``;
    ``constant_bound`` replaces ``q_n`` by the squared error constants.
    """
    X = as_tensor(X)
    if selector not in CONVERT_SELECTORS:
        raise ValueError(f"unknown selector {selector!r}; choose from {CONVERT_SELECTORS}")
    if selector == "simple-leverage" and seed is None:
        raise ValueError("simple-leverage selection needs a seed")
    t0 = time.perf_counter()
    pairs = _mode_pairs(rep, X.ndim)
    seeds = _mode_seeds(seed, X.ndim)
    indices, consts, eps, requested, notes = [], [], [], [], []
    for n, (A, B) in enumerate(pairs):
        Xn = unfold(X, n)
        if A.shape[0] != Xn.shape[0] or B.shape[0] != Xn.shape[1]:
            raise ValueError(f"mode {n}: factors {A.shape}, {B.shape} do not match unfolding {Xn.shape}")
        requested.append(A.shape[1])
        eps.append(float(np.linalg.norm(Xn - A @ B.T)))
        V = _numerical_basis(lowrank_svd_from_factors(A, B), Xn.shape)
        if V.shape[1] < A.shape[1]:
            notes.append(f"mode {n}: factor rank {V.shape[1]} below requested {A.shape[1]}")
        p, c = _select_with_fallback(V, selector, f, seeds[n], notes, n)
        indices.append(p)
        consts.append(c)
    H, abs_err, rel = _finish(X, indices, with_core, core_tol)
    wall = time.perf_counter() - t0

    eps = np.asarray(eps)
    consts = np.asarray(consts)
    q = _bounds.q_factors(X.shape, H.ranks, f)
    return H, ErrorReport(
        rel_error=rel,
        abs_error=abs_err,
        bound=math.sqrt(_bounds.conversion_bound(eps, q)),
        q_factors=q,
        error_constants=consts,
        wall_time_s=wall,
        seed=seed,
        kind=f"convert-{selector}",
        requested_ranks=tuple(requested),
        ranks=H.ranks,
        residuals=eps,
        constant_bound=math.sqrt(float(np.dot(consts**2, eps**2))),
        notes=notes,
        indices=H.indices,
    )


def st_hoid(
    X,
    ranks,
    mode_order: Sequence[int] | None = None,
    f: float = 1.0,
    with_core: bool = True,
    core_tol: float = 1e-12,
):
    """Sequentially truncated interpolatory decomposition.

    Modes are processed in ``mode_order`` (default ``0..d-1``). At each step
    the partially truncated tensor ``S`` is reduced along the current mode by
    its leading left singular vectors; the right singular vectors of the
    implied approximation of ``X_(n)`` drive a strong-RRQR column choice.

    The bound is the square root of ``sum_t q_{n_t} sum_{s <= t} (||X^(s-1)||^2 - ||X^(s)||^2)``
    where ``X^(t)`` is ``X`` projected onto the first ``t`` processed modes;
    ``X^(t)`` is materialized densely.
    """
    X = as_tensor(X)
    ranks = _check_ranks(X, ranks)
    d = X.ndim
    order = list(range(d)) if mode_order is None else [int(n) for n in mode_order]
    if sorted(order) != list(range(d)):
        raise ValueError(f"mode order {order} is not a permutation of 0..{d - 1}")
    t0 = time.perf_counter()
    S = X
    bases = [None] * d
    indices = [None] * d
    consts = [0.0] * d
    notes = []
    for step, n in enumerate(order):
        svd = thin_svd(unfold(S, n), ranks[n])
        U_hat = svd.U
        reduced_dims = list(S.shape)
        reduced_dims[n] = U_hat.shape[1]
        S = fold(svd.S[:, None] * svd.V.T, n, reduced_dims)
        if step == 0:
            approx = svd
        else:
            lifted = multi_mode_multiply(S, [bases[m] if m != n else None for m in range(d)])
            approx = lowrank_svd_from_factors(U_hat, unfold(lifted, n).T)
        bases[n] = U_hat
        V = _numerical_basis(approx, (X.shape[n], _other_size(X.shape, n)))
        if V.shape[1] < ranks[n]:
            notes.append(f"mode {n}: numerical rank {V.shape[1]} below requested {ranks[n]}")
        p, c = _select_with_fallback(V, "rrqr", f, None, notes, n)
        indices[n] = p
        consts[n] = c
    H, abs_err, rel = _finish(X, indices, with_core, core_tol)
    wall = time.perf_counter() - t0

    sq_norms = [frobenius_norm(X) ** 2]
    Y = X
    for n in order:
        Y = mode_multiply(Y, n, bases[n] @ bases[n].T)
        sq_norms.append(frobenius_norm(Y) ** 2)
    if np.any(np.diff(sq_norms) > 0):
        log.info("clamped negative telescoping increments in the sequential bound")
    q_all = _bounds.q_factors(X.shape, H.ranks, f)
    q_steps = np.array([q_all[n] for n in order])
    return H, ErrorReport(
        rel_error=rel,
        abs_error=abs_err,
        bound=math.sqrt(_bounds.sequential_bound(sq_norms, q_steps)),
        q_factors=q_all,
        error_constants=np.asarray(consts),
        wall_time_s=wall,
        kind="st-hoid",
        requested_ranks=ranks,
        ranks=H.ranks,
        residuals=np.sqrt(np.maximum(sq_norms[0] - np.asarray(sq_norms[1:]), 0.0)),
        notes=notes,
        indices=H.indices,
    )


def matrix_cur(A, r: int, f: float = 1.0, selector: str = "rrqr", p: int = 10, seed: int | None = None):
    """CUR factorization ``A ~= C @ U @ R`` as the order-2 case of :func:`hoid`.

    ``C`` holds ``r`` columns and ``R`` holds ``r`` rows of ``A`` verbatim and
    ``U = C^+ A R^+``. The bound is ``sqrt((2 + f^2 r (m + n - 2r)) sum_{k > r} sigma_k^2)``.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {A.shape}")
    H, report = hoid(A, (r, r), selector, f, p, seed, compute_bound=False)
    C, R, U = H.columns[0], H.columns[1].T, H.core
    m, n = A.shape
    rr = min(H.ranks)
    sigma = np.linalg.svd(A, compute_uv=False)
    report.bound = math.sqrt(_bounds.cur_bound(sigma, m, n, rr, f))
    report.kind = f"cur-{selector}"
    return C, U, R, report
