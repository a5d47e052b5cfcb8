"""Deterministic SVD / eigendecompositions and rank primitives.

Every vector returned here follows one sign convention: the entry of
largest magnitude (lowest index on ties) is nonnegative.  Singular pairs
are flipped together so the product ``u v^T`` is unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

SYMMETRY_TOL = 1e-12
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class SpectralForm:
    """Ordered factorization ``X = left @ diag(values) @ right.T``.

    For the symmetric (eigen) path ``values`` are signed eigenvalues and
    ``right`` is the same array as ``left``.
    """

    left: np.ndarray
    values: np.ndarray
    right: np.ndarray
    symmetric: bool = False

    def reconstruct(self, k: int | None = None) -> np.ndarray:
        k = len(self.values) if k is None else k
        return (self.left[:, :k] * self.values[:k]) @ self.right[:, :k].T


def as_matrix(X) -> np.ndarray:
    A = np.asarray(X, dtype=float)
    if A.ndim != 2:
        raise InvalidInput(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix has non-finite entries")
    return A


def check_rank(kappa: int, shape) -> int:
    n = min(shape)
    if int(kappa) != kappa or not 1 <= kappa <= n:
        raise InvalidInput(f"rank bound kappa={kappa} must be an integer in [1, {n}]")
    return int(kappa)


def _sign_flips(V: np.ndarray) -> np.ndarray:
    if V.shape[0] == 0:
        return np.ones(V.shape[1])
    idx = np.argmax(np.abs(V), axis=0)
    lead = V[idx, np.arange(V.shape[1])]
    return np.where(lead < 0, -1.0, 1.0)


def decompose(X, symmetric: bool = False) -> SpectralForm:
    """Sorted SVD (or eigendecomposition if ``symmetric``) of ``X``."""
    A = as_matrix(X)
    if symmetric:
        if A.shape[0] != A.shape[1]:
            raise InvalidInput("symmetric decomposition needs a square matrix")
        if A.size and np.max(np.abs(A - A.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(A))):
            raise InvalidInput("matrix is not symmetric")
        lam, U = np.linalg.eigh(0.5 * (A + A.T))
        order = np.argsort(-lam, kind="stable")
        lam, U = lam[order], U[:, order]
        U = U * _sign_flips(U)
        return SpectralForm(U, lam, U, symmetric=True)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    order = np.argsort(-s, kind="stable")
    U, s, V = U[:, order], s[order], Vt[order].T
    flips = _sign_flips(U)
    return SpectralForm(U * flips, s, V * flips)


def singular_values(X) -> np.ndarray:
    return np.linalg.svd(as_matrix(X), compute_uv=False)


def numerical_rank(X, rtol: float = RANK_RTOL) -> int:
    s = singular_values(X)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s >= rtol * s[0]))


def tail_sum(X, kappa: int) -> float:
    """Sum of the singular values beyond the ``kappa`` largest."""
    s = singular_values(X)
    check_rank(kappa, np.shape(X))
    return float(np.sum(s[kappa:]))


def nuclear_norm(X) -> float:
    return float(np.sum(singular_values(X)))


def kyfan_norm(X, kappa: int) -> float:
    """Sum of the ``kappa`` largest singular values."""
    s = singular_values(X)
    check_rank(kappa, np.shape(X))
    return float(np.sum(s[:kappa]))


def truncate(X, kappa: int, symmetric: bool = False) -> np.ndarray:
    """Best rank-``kappa`` approximation.

    With ``symmetric`` the ``kappa`` largest *signed* eigenpairs are kept,
    which is the truncation used over the PSD-based sets.
    """
    A = as_matrix(X)
    kappa = check_rank(kappa, A.shape)
    sf = decompose(A, symmetric=symmetric)
    P = sf.reconstruct(kappa)
    return 0.5 * (P + P.T) if symmetric else P


def kyfan_subgradient(Xhat, kappa: int) -> np.ndarray:
    """``U_1 V_1^T`` built from the ``kappa`` leading singular pairs.

    This is an element of the subdifferential of the Ky Fan norm at
    ``Xhat``; when ``sigma_kappa`` is repeated the deterministic ordering of
    :func:`decompose` picks one element.
    """
    A = as_matrix(Xhat)
    kappa = check_rank(kappa, A.shape)
    sf = decompose(A)
    return sf.left[:, :kappa] @ sf.right[:, :kappa].T
