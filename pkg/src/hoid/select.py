"""Column subset selection from (approximate) right singular vectors.

Every selector takes ``V`` of shape ``(n, k)`` and returns 0-based row indices
of ``V`` (columns of the matrix ``V`` came from). The quality of a selection
``p`` is the error constant ``||(V[p, :])^-1||_2``, the norm of the oblique
interpolatory projector ``P (V^T P)^-1 V^T``.
"""
from __future__ import annotations

import math

import numpy as np
import scipy.linalg as sla

from .linalg import pivoted_qr, strong_rrqr


class SingularSelectionError(np.linalg.LinAlgError):
    """``V[p, :]`` is (numerically) singular."""


def _as_basis(V) -> np.ndarray:
    V = np.asarray(V, dtype=np.float64)
    if V.ndim == 1:
        V = V[:, None]
    if V.ndim != 2 or V.shape[1] > V.shape[0]:
        raise ValueError(f"expected an n x k basis with k <= n, got shape {V.shape}")
    return V


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def deim_select(V) -> np.ndarray:
    """Greedy DEIM: each new index is the largest residual of the next basis
    vector after interpolating it at the indices chosen so far."""
    V = _as_basis(V)
    n, k = V.shape
    p = [int(np.argmax(np.abs(V[:, 0])))]
    for j in range(1, k):
        v = V[:, j]
        Vp = V[p, :j]
        try:
            c = np.linalg.solve(Vp, v[p])
        except np.linalg.LinAlgError as exc:
            raise SingularSelectionError(f"interpolation system singular at step {j}") from exc
        r = v - V[:, :j] @ c
        p.append(int(np.argmax(np.abs(r))))
    if len(set(p)) != k:
        raise SingularSelectionError("DEIM produced a repeated index; basis rows are dependent")
    return np.asarray(p, dtype=np.int64)


def pqr_select(V) -> np.ndarray:
    """First ``k`` pivots of greedy pivoted QR on ``V^T``."""
    V = _as_basis(V)
    return pivoted_qr(V.T).perm[: V.shape[1]].copy()


def rrqr_select(V, f: float = 1.0) -> np.ndarray:
    """First ``k`` pivots of strong RRQR on ``V^T``."""
    V = _as_basis(V)
    k = V.shape[1]
    res = strong_rrqr(V.T, k, f)
    if res.k < k:
        raise SingularSelectionError(f"basis has numerical rank {res.k} < {k}")
    return res.perm[:k].copy()


def leverage_scores(V) -> np.ndarray:
    """Squared row norms of ``V``, normalised to sum to one.

    For orthonormal ``V`` this is the usual ``||V[j, :]||^2 / k``.
    """
    V = _as_basis(V)
    sq = np.einsum("ij,ij->i", V, V)
    total = sq.sum()
    if total == 0.0:
        raise ValueError("all leverage scores are zero")
    return sq / total


def leverage_sample(V, c: float, seed: int, max_tries: int = 10) -> np.ndarray:
    """Keep row ``j`` independently with probability ``min(1, c * pi_j)``."""
    if c < 1:
        raise ValueError(f"target count must be >= 1, got {c}")
    probs = np.minimum(1.0, c * leverage_scores(V))
    rng = _rng(seed)
    for _ in range(max_tries):
        keep = np.nonzero(rng.random(probs.size) < probs)[0]
        if keep.size:
            return keep.astype(np.int64)
    raise RuntimeError(f"leverage sampling selected nothing in {max_tries} attempts")


def simple_leverage_count(r: int) -> int:
    return max(4 * r, math.ceil(r * math.log(r)))


def simple_leverage_select(V, r: int | None = None, f: float = 1.0, seed: int = 0) -> np.ndarray:
    """Draw ``max(4r, ceil(r ln r))`` candidate rows by leverage score without
    replacement (renormalising after each draw), then keep ``r`` of them with
    strong RRQR."""
    V = _as_basis(V)
    n, k = V.shape
    r = k if r is None else r
    if not 1 <= r <= n:
        raise ValueError(f"rank {r} out of range for {n} rows")
    pi = leverage_scores(V)
    support = np.count_nonzero(pi)
    if support < r:
        raise SingularSelectionError(f"only {support} rows have nonzero leverage, need {r}")
    count = min(simple_leverage_count(r), support)
    rng = _rng(seed)
    weights = pi.copy()
    cand = []
    for _ in range(count):
        j = int(rng.choice(n, p=weights / weights.sum()))
        cand.append(j)
        weights[j] = 0.0
    cand = np.sort(np.asarray(cand, dtype=np.int64))
    sub = V[cand, :r] if r < k else V[cand]
    res = strong_rrqr(sub.T, r, f)
    if res.k < r:
        raise SingularSelectionError(f"sampled rows have numerical rank {res.k} < {r}")
    return cand[res.perm[:r]]


def error_constant(V, p) -> float:
    """``||(V[p, :])^-1||_2``; raises :class:`SingularSelectionError` if singular."""
    V = _as_basis(V)
    p = np.asarray(p, dtype=np.int64)
    if p.size != V.shape[1]:
        raise ValueError(f"need {V.shape[1]} indices, got {p.size}")
    s = sla.svdvals(V[p, :])
    if s[-1] == 0.0 or s[-1] <= np.finfo(np.float64).eps * s[0]:
        raise SingularSelectionError(f"V[p, :] is singular for p = {p.tolist()}")
    return float(1.0 / s[-1])


def interpolatory_projector(V, p) -> np.ndarray:
    """Dense oblique projector ``P (V^T P)^-1 V^T``."""
    V = _as_basis(V)
    n, k = V.shape
    P = np.zeros((n, k))
    P[np.asarray(p), np.arange(k)] = 1.0
    return P @ np.linalg.solve(V.T @ P, V.T)


def deim_bound_original(V) -> float:
    V = _as_basis(V)
    n, k = V.shape
    return (1.0 + math.sqrt(2 * n)) ** (k - 1) / float(np.max(np.abs(V[:, 0])))


def deim_bound(n: int, k: int) -> float:
    return math.sqrt(n * k / 3.0) * 2.0**k


def pqr_bound(n: int, k: int) -> float:
    return math.sqrt(n - k + 1) * math.sqrt(4.0**k + 6 * n - 1) / 3.0


def rrqr_bound(n: int, k: int, f: float = 1.0) -> float:
    return math.sqrt(1.0 + f * f * k * (n - k))


SELECTORS = {
    "deim": lambda V, f, seed: deim_select(V),
    "pqr": lambda V, f, seed: pqr_select(V),
    "rrqr": lambda V, f, seed: rrqr_select(V, f),
    "simple-leverage": lambda V, f, seed: simple_leverage_select(V, None, f, seed),
}


def select_indices(V, selector: str, f: float = 1.0, seed: int | None = None) -> np.ndarray:
    try:
        fn = SELECTORS[selector]
    except KeyError:
        raise ValueError(f"unknown selector {selector!r}; choose from {sorted(SELECTORS)}") from None
    if selector == "simple-leverage" and seed is None:
        raise ValueError("simple-leverage selection needs a seed")
    return fn(V, f, seed)
