"""Matrix kernels: pivoted and strong rank-revealing QR, SVD helpers and
interpolative decompositions.

Column indices are 0-based. Random sketches draw from
``numpy.random.Generator(PCG64(seed))`` so that a seed fixes the result on
every platform numpy supports.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla


class RankDeficiencyWarning(UserWarning):
    """The requested rank exceeds the numerical rank of the input."""


@dataclass(frozen=True)
class PivotedQrResult:
    Q: np.ndarray
    R: np.ndarray
    perm: np.ndarray

    def numerical_rank(self, rtol: float | None = None) -> int:
        diag = np.abs(np.diag(self.R))
        if diag.size == 0 or diag[0] == 0.0:
            return 0
        if rtol is None:
            rtol = np.finfo(np.float64).eps * max(self.R.shape[1], self.Q.shape[0])
        # diag is nonincreasing only for plain greedy pivoting; use a cumulative test
        below = np.nonzero(diag <= rtol * diag.max())[0]
        return int(below[0]) if below.size else diag.size


@dataclass(frozen=True)
class StrongRrqrResult:
    Q: np.ndarray
    R: np.ndarray
    perm: np.ndarray
    k: int
    f: float
    n_swaps: int = 0
    requested_k: int | None = None

    @property
    def R11(self):
        return self.R[: self.k, : self.k]

    @property
    def R12(self):
        return self.R[: self.k, self.k:]

    @property
    def R22(self):
        return self.R[self.k:, self.k:]

    @property
    def rank_deficient(self) -> bool:
        return self.requested_k is not None and self.k < self.requested_k


@dataclass(frozen=True)
class ThinSvd:
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray


@dataclass(frozen=True)
class InterpDecomp:
    """``A ~= C @ F.T`` with ``C = A[:, indices]`` and ``F[indices] = I``."""

    C: np.ndarray
    F: np.ndarray
    indices: np.ndarray
    est_error: float
    requested_k: int | None = None

    @property
    def k(self) -> int:
        return self.indices.size

    @property
    def rank_deficient(self) -> bool:
        return self.requested_k is not None and self.k < self.requested_k


def pivoted_qr(A, leading=None) -> PivotedQrResult:
    """Householder QR with greedy column pivoting, ``A[:, perm] = Q @ R``.

    At every step the column with the largest residual norm is moved forward;
    ties go to the smallest current position. ``Q`` is thin, ``m x min(m, n)``.

    If ``leading`` is given, those columns (original indices) are forced into the
    first ``len(leading)`` positions, with greedy pivoting applied within that
    block and then within the rest.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {A.shape}")
    m, n = A.shape
    perm = np.arange(n)
    block = 0
    if leading is not None:
        leading = np.asarray(leading, dtype=np.int64)
        rest = np.setdiff1d(perm, leading, assume_unique=False)
        perm = np.concatenate([leading, rest])
        block = leading.size
    R = A[:, perm].copy()
    kmin = min(m, n)
    Q = np.eye(m)
    for j in range(kmin):
        stop = block if j < block else n
        norms = np.einsum("ij,ij->j", R[j:, j:stop], R[j:, j:stop])
        p = j + int(np.argmax(norms))
        if p != j:
            R[:, [j, p]] = R[:, [p, j]]
            perm[[j, p]] = perm[[p, j]]
        x = R[j:, j]
        normx = np.linalg.norm(x)
        if normx == 0.0:
            continue
        alpha = -normx if x[0] >= 0 else normx
        v = x.copy()
        v[0] -= alpha
        vv = v @ v
        if vv == 0.0:
            continue
        R[j:, j:] -= np.outer(v, (2.0 / vv) * (v @ R[j:, j:]))
        Q[:, j:] -= np.outer((2.0 / vv) * (Q[:, j:] @ v), v)
        R[j + 1:, j] = 0.0
        R[j, j] = alpha
    return PivotedQrResult(Q[:, :kmin], np.triu(R[:kmin, :]), perm)


def _swap_scores(A, sel, rest):
    """Strong-RRQR swap scores for the split ``sel | rest``.

    ``rho[i, j]**2 = (R11^-1 R12)[i, j]**2 + (gamma_j(R22) * ||R11^-1[i, :]||)**2``;
    swapping ``sel[i]`` with ``rest[j]`` multiplies ``|det R11|`` by ``rho[i, j]``.
    """
    Q1, R11 = np.linalg.qr(A[:, sel])
    B = A[:, rest]
    R12 = Q1.T @ B
    resid = B - Q1 @ R12
    gamma = np.linalg.norm(resid, axis=0)
    T = sla.solve_triangular(R11, R12)
    Rinv = sla.solve_triangular(R11, np.eye(len(sel)))
    omega_inv = np.linalg.norm(Rinv, axis=1)
    return np.sqrt(T**2 + np.outer(omega_inv, gamma) ** 2)


def strong_rrqr(A, k: int, f: float = 1.0, max_swaps: int | None = None) -> StrongRrqrResult:
    """Strong rank-revealing QR at fixed rank ``k``.

    Starts from greedy pivoted QR, then swaps a leading column with a trailing
    one while some swap would grow ``|det R11|`` by more than ``f``. On exit

        sigma_i(R11) >= sigma_i(A) / sqrt(1 + f^2 k (n - k))
        |(R11^-1 R12)_ij| <= f

    If ``A`` has numerical rank below ``k``, the factorization is returned at
    the achieved rank with a :class:`RankDeficiencyWarning`.
    """
    A = np.asarray(A, dtype=np.float64)
    m, n = A.shape
    if not 1 <= k <= min(m, n):
        raise ValueError(f"rank {k} out of range for a {m}x{n} matrix")
    if not f >= 1.0:
        raise ValueError(f"tolerance parameter f must be >= 1, got {f}")

    base = pivoted_qr(A)
    kk = min(k, base.numerical_rank())
    if kk < k:
        warnings.warn(
            f"requested rank {k} but numerical rank is {kk}", RankDeficiencyWarning, stacklevel=2
        )
    if kk == 0 or kk == n:
        return StrongRrqrResult(base.Q, base.R, base.perm, kk, f, 0, k)

    sel = base.perm[:kk].copy()
    rest = base.perm[kk:].copy()
    if max_swaps is None:
        max_swaps = 10 * n * kk + 100
    threshold = f * (1.0 + 1e-12)
    swaps = 0
    # near-duplicate columns can score rho = f + O(eps) in both directions
    seen = {frozenset(sel.tolist())}
    while True:
        rho = _swap_scores(A, sel, rest)
        i, j = np.unravel_index(int(np.argmax(rho)), rho.shape)
        if not rho[i, j] > threshold:
            break
        if swaps >= max_swaps:
            warnings.warn(f"strong RRQR stopped after {swaps} swaps", RuntimeWarning, stacklevel=2)
            break
        candidate = sel.copy()
        candidate[i] = rest[j]
        key = frozenset(candidate.tolist())
        if key in seen:
            break
        seen.add(key)
        sel[i], rest[j] = rest[j], sel[i]
        swaps += 1

    if swaps == 0:
        res = base
    else:
        res = pivoted_qr(A, leading=sel)
    return StrongRrqrResult(res.Q, res.R, res.perm, kk, f, swaps, k)


def thin_svd(A, r: int | None = None) -> ThinSvd:
    A = np.asarray(A, dtype=np.float64)
    kmin = min(A.shape)
    if r is not None and not 0 <= r <= kmin:
        raise ValueError(f"rank {r} out of range for a {A.shape[0]}x{A.shape[1]} matrix")
    if kmin == 0:
        return ThinSvd(np.zeros((A.shape[0], 0)), np.zeros(0), np.zeros((A.shape[1], 0)))
    U, S, Vt = np.linalg.svd(A, full_matrices=False)
    if r is not None:
        U, S, Vt = U[:, :r], S[:r], Vt[:r]
    return ThinSvd(U, S, Vt.T)


def pseudo_inverse(A, tol: float = 1e-12) -> np.ndarray:
    """Moore-Penrose inverse, dropping singular values below ``tol * sigma_1``."""
    A = np.asarray(A, dtype=np.float64)
    svd = thin_svd(A)
    if svd.S.size == 0 or svd.S[0] == 0.0:
        return np.zeros(A.T.shape)
    keep = svd.S > tol * svd.S[0]
    return (svd.V[:, keep] / svd.S[keep]) @ svd.U[:, keep].T


def _interp_from_qr(A, res, requested_k):
    k = res.k
    perm = res.perm
    n = A.shape[1]
    F = np.zeros((n, k))
    F[perm[:k], np.arange(k)] = 1.0
    if k:
        R11 = res.R[:k, :k]
        T = sla.solve_triangular(R11, res.R[:k, k:])
        F[perm[k:], :] = T.T
    idx = perm[:k].copy()
    est = float(np.linalg.norm(res.R[k:, k:]))
    return InterpDecomp(A[:, idx], F, idx, est, requested_k)


def interp_decomp(A, k: int, f: float = 1.0, strong: bool = True) -> InterpDecomp:
    """Interpolative decomposition ``A ~= C F^T`` from a rank-revealing QR.

    With ``strong=False`` plain greedy pivoted QR chooses the columns.
    ``est_error`` is ``||R22||_F``, which equals ``||A - C F^T||_F``.
    """
    A = np.asarray(A, dtype=np.float64)
    m, n = A.shape
    if not 1 <= k <= min(m, n):
        raise ValueError(f"rank {k} out of range for a {m}x{n} matrix")
    if strong:
        res = strong_rrqr(A, k, f)
    else:
        pqr = pivoted_qr(A)
        kk = min(k, pqr.numerical_rank())
        if kk < k:
            warnings.warn(
                f"requested rank {k} but numerical rank is {kk}", RankDeficiencyWarning, stacklevel=2
            )
        res = StrongRrqrResult(pqr.Q, pqr.R, pqr.perm, kk, f, 0, k)
    return _interp_from_qr(A, res, k)


def gaussian_sketch(rows: int, cols: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.standard_normal((rows, cols))


def randomized_interp_decomp(A, k: int, p: int = 10, f: float = 1.0, seed: int = 0) -> InterpDecomp:
    """Sketched interpolative decomposition.

    Columns are chosen by strong RRQR of ``Omega @ A`` with a ``(k + p) x m``
    Gaussian ``Omega``; ``F`` is the least-squares fit ``C^+ A``.
    """
    A = np.asarray(A, dtype=np.float64)
    m, n = A.shape
    if not 1 <= k <= min(m, n):
        raise ValueError(f"rank {k} out of range for a {m}x{n} matrix")
    if p < 0:
        raise ValueError("oversampling must be nonnegative")
    Y = gaussian_sketch(k + p, m, seed) @ A
    res = strong_rrqr(Y, k, f)
    idx = res.perm[: res.k].copy()
    C = A[:, idx]
    F = (pseudo_inverse(C) @ A).T
    est = float(np.linalg.norm(A - C @ F.T))
    return InterpDecomp(C, F, idx, est, k)


def lowrank_svd_from_factors(A, B) -> ThinSvd:
    """SVD of ``A @ B.T`` without forming the product."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[1]:
        raise ValueError(f"inner dimensions differ: {A.shape} vs {B.shape}")
    QA, RA = np.linalg.qr(A)
    QB, RB = np.linalg.qr(B)
    M = thin_svd(RA @ RB.T)
    return ThinSvd(QA @ M.U, M.S, QB @ M.V)
