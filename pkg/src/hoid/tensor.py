"""Dense tensor plumbing: unfolding, folding, mode products and low-rank formats.

Tensors are plain ``numpy.ndarray`` objects of dtype float64. The unfolding
convention is the reversed-Kronecker one: the columns of ``unfold(X, n)`` are
the mode-``n`` fibers, ordered with the first remaining index varying fastest.
With this convention

    unfold(G x_1 U_1 ... x_d U_d, n) = U_n G_(n) (U_d kron ... kron U_1)^T

holds with mode ``n`` skipped in the Kronecker chain. Modes are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np


def as_tensor(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim < 1:
        raise ValueError("a tensor needs at least one mode")
    return X


def _check_mode(n: int, d: int) -> None:
    if not 0 <= n < d:
        raise ValueError(f"mode {n} out of range for an order-{d} tensor")


def unfold(X, n: int) -> np.ndarray:
    """Mode-``n`` unfolding, shape ``(I_n, prod_{k != n} I_k)``."""
    X = as_tensor(X)
    _check_mode(n, X.ndim)
    return np.reshape(np.moveaxis(X, n, 0), (X.shape[n], -1), order="F")


def fold(M, n: int, dims: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`unfold`."""
    M = np.asarray(M, dtype=np.float64)
    dims = tuple(int(i) for i in dims)
    _check_mode(n, len(dims))
    rest = dims[:n] + dims[n + 1:]
    expected = (dims[n], int(np.prod(rest, dtype=np.int64)))
    if M.shape != expected:
        raise ValueError(f"cannot fold a {M.shape} matrix along mode {n} into {dims}")
    return np.moveaxis(np.reshape(M, (dims[n],) + rest, order="F"), 0, n)


def mode_multiply(X, n: int, U) -> np.ndarray:
    """``X x_n U``: contracts mode ``n`` of ``X`` with the columns of ``U``."""
    X = as_tensor(X)
    U = np.asarray(U, dtype=np.float64)
    _check_mode(n, X.ndim)
    if U.ndim != 2 or U.shape[1] != X.shape[n]:
        raise ValueError(
            f"matrix of shape {U.shape} does not act on mode {n} of size {X.shape[n]}"
        )
    Y = np.tensordot(U, X, axes=(1, n))
    return np.moveaxis(Y, 0, n)


def multi_mode_multiply(X, matrices, modes=None) -> np.ndarray:
    """Successive mode products; ``None`` entries are skipped."""
    Y = as_tensor(X)
    if modes is None:
        modes = range(len(matrices))
    for n, U in zip(modes, matrices):
        if U is not None:
            Y = mode_multiply(Y, n, U)
    return Y


def frobenius_norm(X) -> float:
    return float(np.linalg.norm(np.ravel(as_tensor(X))))


def kronecker(A, B) -> np.ndarray:
    return np.kron(np.asarray(A, dtype=np.float64), np.asarray(B, dtype=np.float64))


def khatri_rao(A, B) -> np.ndarray:
    """Columnwise Kronecker product."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[1]:
        raise ValueError(f"column counts differ: {A.shape} vs {B.shape}")
    return np.einsum("ir,jr->ijr", A, B).reshape(A.shape[0] * B.shape[0], A.shape[1])


@dataclass(frozen=True)
class TuckerDecomp:
    core: np.ndarray
    factors: tuple

    def __post_init__(self):
        core = as_tensor(self.core)
        factors = tuple(np.asarray(U, dtype=np.float64) for U in self.factors)
        if core.ndim != len(factors):
            raise ValueError("core order must equal the number of factors")
        for n, U in enumerate(factors):
            if U.ndim != 2 or U.shape[1] != core.shape[n]:
                raise ValueError(f"factor {n} has shape {U.shape}, core dim is {core.shape[n]}")
        object.__setattr__(self, "core", core)
        object.__setattr__(self, "factors", factors)

    @property
    def ranks(self):
        return self.core.shape

    @property
    def dims(self):
        return tuple(U.shape[0] for U in self.factors)


@dataclass(frozen=True)
class CpDecomp:
    weights: np.ndarray
    factors: tuple

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64).ravel()
        factors = tuple(np.asarray(Z, dtype=np.float64) for Z in self.factors)
        if not factors:
            raise ValueError("a CP decomposition needs at least one factor")
        for n, Z in enumerate(factors):
            if Z.ndim != 2 or Z.shape[1] != weights.size:
                raise ValueError(f"factor {n} has shape {Z.shape}, expected {weights.size} columns")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "factors", factors)

    @property
    def rank(self):
        return self.weights.size

    @property
    def dims(self):
        return tuple(Z.shape[0] for Z in self.factors)


def tucker_to_full(T: TuckerDecomp) -> np.ndarray:
    return multi_mode_multiply(T.core, T.factors)


def cp_to_full(C: CpDecomp) -> np.ndarray:
    out = np.zeros(C.dims)
    for r in range(C.rank):
        term = reduce(np.multiply.outer, [Z[:, r] for Z in C.factors])
        out += C.weights[r] * np.asarray(term).reshape(C.dims)
    return out


def cp_to_tucker(C: CpDecomp) -> TuckerDecomp:
    R, d = C.rank, len(C.factors)
    core = np.zeros((R,) * d)
    core[(np.arange(R),) * d] = C.weights
    return TuckerDecomp(core, C.factors)


def _reverse_chain(mats, n, op):
    chain = [mats[k] for k in reversed(range(len(mats))) if k != n]
    if not chain:
        return np.ones((1, 1))
    return reduce(op, chain)


def lowrank_mode_factors(rep, n: int):
    """Factors ``(A_n, B_n)`` with ``A_n @ B_n.T == unfold(full(rep), n)``.

    Tucker: ``A_n = U_n`` and ``B_n = (U_d kron ... kron U_1) G_(n)^T``.
    CP: ``A_n = Z_n`` and ``B_n = (Z_d kr ... kr Z_1) diag(weights)``.
    """
    if isinstance(rep, TuckerDecomp):
        _check_mode(n, len(rep.factors))
        K = _reverse_chain(rep.factors, n, np.kron)
        return rep.factors[n], K @ unfold(rep.core, n).T
    if isinstance(rep, CpDecomp):
        _check_mode(n, len(rep.factors))
        K = _reverse_chain(rep.factors, n, khatri_rao)
        if K.shape == (1, 1):
            K = np.ones((1, rep.rank))
        return rep.factors[n], K * rep.weights
    raise TypeError(f"unsupported representation {type(rep).__name__}")
