"""Compact convex sets Omega: norm balls, density matrices, correlation matrices.

Each set knows its exact Euclidean projection and the constant ``c`` for
which ``dist(X, Omega ∩ {rank <= kappa}) <= c * tail_sum(X, kappa)`` holds
on Omega.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import ConvergenceFailure, InvalidInput

BALL_NORMS = ("frobenius", "spectral", "nuclear", "inf")
UNITARILY_INVARIANT = ("frobenius", "spectral", "nuclear")


@dataclass(frozen=True)
class SetSpec:
    kind: str
    shape: tuple
    norm: str | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in ("ball", "density", "correlation"):
            raise InvalidInput(f"unknown set kind {self.kind!r}")
        n1, n2 = self.shape
        if n1 < 1 or n2 < 1:
            raise InvalidInput("set dimensions must be positive")
        if self.kind == "ball":
            if self.norm not in BALL_NORMS:
                raise InvalidInput(f"unknown ball norm {self.norm!r}")
            if self.gamma is None or not self.gamma > 0:
                raise InvalidInput("ball radius gamma must be positive")
        elif n1 != n2:
            raise InvalidInput(f"{self.kind} set needs square dimensions")

    @classmethod
    def ball(cls, norm: str, gamma: float, shape) -> "SetSpec":
        return cls("ball", tuple(int(d) for d in shape), norm, float(gamma))

    @classmethod
    def density(cls, n: int) -> "SetSpec":
        return cls("density", (int(n), int(n)))

    @classmethod
    def correlation(cls, n: int) -> "SetSpec":
        return cls("correlation", (int(n), int(n)))

    @property
    def n(self) -> int:
        return min(self.shape)

    @property
    def symmetric(self) -> bool:
        return self.kind != "ball"

    @property
    def c_lower(self) -> float:
        """Largest ``c_l`` with ``c_l ||X||_F <= |||X|||`` (1 for PSD sets)."""
        if self.kind != "ball" or self.norm in ("frobenius", "nuclear"):
            return 1.0
        if self.norm == "spectral":
            return 1.0 / math.sqrt(self.n)
        return 1.0 / math.sqrt(self.shape[0] * self.shape[1])

    @property
    def c_upper(self) -> float:
        if self.kind == "ball" and self.norm == "nuclear":
            return math.sqrt(self.n)
        return 1.0

    @property
    def unitarily_invariant(self) -> bool:
        return self.kind == "ball" and self.norm in UNITARILY_INVARIANT

    @property
    def constant_c(self) -> float:
        """Error-bound constant of the feasible set Omega ∩ {rank <= kappa}."""
        if self.kind == "density":
            return math.sqrt(2.0)
        if self.kind == "correlation":
            return 1.0 + 2.0 * self.n
        if self.unitarily_invariant:
            return 1.0
        return math.sqrt(1.0 + (self.c_upper / self.c_lower) ** 2)

    @property
    def radius(self) -> float:
        """Upper bound on ``||X||_F`` over the set."""
        if self.kind == "density":
            return 1.0
        if self.kind == "correlation":
            return float(self.n)
        return self.gamma / self.c_lower

    def ball_norm(self, X) -> float:
        X = np.asarray(X, dtype=float)
        if self.norm == "frobenius":
            return float(np.linalg.norm(X))
        if self.norm == "spectral":
            return float(np.linalg.norm(X, 2)) if X.size else 0.0
        if self.norm == "nuclear":
            return spectral.nuclear_norm(X)
        return float(np.max(np.abs(X))) if X.size else 0.0

    def check_shape(self, X) -> np.ndarray:
        A = spectral.as_matrix(X)
        if A.shape != tuple(self.shape):
            raise InvalidInput(f"matrix shape {A.shape} does not match set shape {self.shape}")
        return A

    def to_dict(self) -> dict:
        if self.kind == "ball":
            return {"kind": "ball", "norm": self.norm, "gamma": self.gamma,
                    "rows": self.shape[0], "cols": self.shape[1]}
        return {"kind": self.kind, "n": self.shape[0]}


@dataclass
class ProjectionResult:
    point: np.ndarray
    distance: float
    iterations: int = 1

    def to_dict(self) -> dict:
        return {"point": matrix_to_dict(self.point), "distance": self.distance,
                "iterations": self.iterations}


def matrix_to_dict(X) -> dict:
    X = np.asarray(X, dtype=float)
    return {"rows": X.shape[0], "cols": X.shape[1], "data": X.ravel().tolist()}


def _sym(X):
    return 0.5 * (X + X.T)


def _min_eig(X) -> float:
    return float(np.linalg.eigvalsh(_sym(X))[0]) if X.size else 0.0


def member(X, s: SetSpec, tol: float = 1e-9) -> bool:
    A = s.check_shape(X)
    if s.kind == "ball":
        return s.ball_norm(A) <= s.gamma + tol
    if np.max(np.abs(A - A.T)) > tol:
        return False
    if _min_eig(A) < -tol:
        return False
    if s.kind == "density":
        return abs(np.trace(A) - 1.0) <= tol
    return float(np.max(np.abs(np.diag(A) - 1.0))) <= tol


def project_simplex(v, radius: float = 1.0) -> np.ndarray:
    """Euclidean projection of ``v`` onto ``{x >= 0, sum(x) = radius}`` (sort and threshold)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - radius
    j = np.arange(1, len(v) + 1)
    cond = u - css / j > 0
    r = j[cond][-1]
    theta = css[r - 1] / r
    return np.maximum(v - theta, 0.0)


def project_psd(X) -> np.ndarray:
    lam, U = np.linalg.eigh(_sym(X))
    P = (U * np.maximum(lam, 0.0)) @ U.T
    return _sym(P)


def _project_ball(A, s: SetSpec) -> np.ndarray:
    g = s.gamma
    if s.norm == "inf":
        return np.clip(A, -g, g)
    if s.norm == "frobenius":
        nrm = np.linalg.norm(A)
        return A if nrm <= g else A * (g / nrm)
    sf = spectral.decompose(A)
    sv = sf.values
    if s.norm == "spectral":
        if sv.size == 0 or sv[0] <= g:
            return A
        sv = np.minimum(sv, g)
    else:
        if np.sum(sv) <= g:
            return A
        sv = project_simplex(sv, g)
    return (sf.left * sv) @ sf.right.T


def _project_correlation(A, max_iter: int, tol: float):
    """Dykstra's method between the PSD cone and the unit-diagonal subspace."""
    n = A.shape[0]
    Y = _sym(A)
    Y[np.diag_indices(n)] = 1.0
    correction = np.zeros_like(Y)
    for it in range(1, max_iter + 1):
        R = Y - correction
        Xp = project_psd(R)
        correction = Xp - R
        Y_prev = Y
        Y = Xp.copy()
        Y[np.diag_indices(n)] = 1.0
        step = np.linalg.norm(Y - Y_prev)
        diag_res = float(np.max(np.abs(np.diag(Xp) - 1.0)))
        psd_res = max(0.0, -_min_eig(Y))
        if step <= tol and diag_res <= 1e-9 and psd_res <= 1e-9:
            return Y, it
    raise ConvergenceFailure(
        f"Dykstra projection did not converge in {max_iter} iterations",
        best=Y, residuals={"step": step, "diag": diag_res, "psd": psd_res})


def project(X, s: SetSpec, max_iter: int = 100_000, tol: float = 1e-10) -> ProjectionResult:
    """Euclidean projection of ``X`` onto the set.

    Density and correlation projections act on the symmetric part of ``X``,
    which is exact since both sets contain only symmetric matrices.
    Raises :class:`ConvergenceFailure` if the Dykstra loop for correlation
    matrices exceeds ``max_iter``.
    """
    A = s.check_shape(X)
    iterations = 1
    if s.kind == "ball":
        P = _project_ball(A, s)
    elif s.kind == "density":
        lam, U = np.linalg.eigh(_sym(A))
        P = _sym((U * project_simplex(lam)) @ U.T)
    else:
        P, iterations = _project_correlation(A, max_iter, tol)
    return ProjectionResult(P, float(np.linalg.norm(A - P)), iterations)


def dist_to_omega(X, s: SetSpec) -> float:
    return project(X, s).distance


@dataclass
class Surrogate:
    """Residual-based stand-in for ``dist(X, Omega)``.

    ``rigorous`` is False whenever the value is only correct up to an
    unknown Hoffman-type multiplier (taken as 1 here).
    """

    value: float
    rigorous: bool
    note: str = ""


def omega_residual_surrogate(X, s: SetSpec) -> Surrogate:
    A = s.check_shape(X)
    if s.kind == "ball":
        # radial scaling gives a feasible point at exactly this distance bound
        return Surrogate(max(s.ball_norm(A) - s.gamma, 0.0) / s.c_lower, True,
                         "radial scaling bound")
    psd_gap = float(np.linalg.norm(_sym(A) - project_psd(A)))
    if s.kind == "density":
        affine = abs(1.0 - float(np.trace(A))) / math.sqrt(s.n)
    else:
        affine = float(np.linalg.norm(1.0 - np.diag(A)))
    return Surrogate(affine + psd_gap, False,
                     "Hoffman constant unknown; multiplier taken as 1")
