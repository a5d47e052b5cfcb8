"""Feasible points of Omega ∩ {rank <= kappa} built from the rank truncation.

Each constructor returns a :class:`WitnessCertificate` whose ``dist_upper``
is a rigorous upper bound on ``dist(X, F)`` when the input lies in Omega.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import InvalidInput
from .sets import SetSpec, matrix_to_dict, member

DIAG_EPS = 1e-12
OMEGA_TOL = 1e-8


@dataclass
class WitnessCertificate:
    witness: np.ndarray
    dist_upper: float
    witness_distance: float
    tail: float
    constant_c: float
    bound_form: str
    input_in_omega: bool
    inclusion_constant: float | None = None

    @property
    def rigorous(self) -> bool:
        return self.input_in_omega

    def to_dict(self) -> dict:
        return {
            "witness": matrix_to_dict(self.witness),
            "dist_upper": self.dist_upper,
            "witness_distance": self.witness_distance,
            "tail": self.tail,
            "constant_c": self.constant_c,
            "bound_form": self.bound_form,
            "input_in_omega": self.input_in_omega,
            "inclusion_constant": self.inclusion_constant,
        }


def _certificate(X, W, upper, tail, s, form, in_omega, inclusion=None):
    dist = float(np.linalg.norm(X - W))
    if not in_omega:
        # outside Omega the bound does not apply; report the plain distance
        upper, form = dist, form + ":raw"
    return WitnessCertificate(W, float(upper), dist, float(tail), s.constant_c, form,
                              bool(in_omega), inclusion)


def _eig_split(X, kappa):
    sf = spectral.decompose(X, symmetric=True)
    P = sf.reconstruct(kappa)
    P = 0.5 * (P + P.T)
    rest = sf.values[kappa:]
    return sf, P, float(np.sqrt(np.sum(rest**2))), float(np.sum(np.abs(rest)))


def witness_ball(X, kappa: int, s: SetSpec) -> WitnessCertificate:
    A = s.check_shape(X)
    kappa = spectral.check_rank(kappa, A.shape)
    P = spectral.truncate(A, kappa)
    scale = s.gamma / max(s.gamma, s.ball_norm(P))
    W = scale * P
    resid_f = float(np.linalg.norm(A - P))
    upper = s.constant_c * resid_f
    form = "ball:unitarily_invariant" if s.unitarily_invariant else "ball:norm_equivalence"
    return _certificate(A, W, upper, spectral.tail_sum(A, kappa), s, form,
                        member(A, s, OMEGA_TOL), s.constant_c)


def _sym_input(X, s):
    A = s.check_shape(X)
    if np.max(np.abs(A - A.T)) > spectral.SYMMETRY_TOL * max(1.0, np.max(np.abs(A))):
        raise InvalidInput(f"{s.kind} witness needs a symmetric matrix")
    return 0.5 * (A + A.T)


def witness_density(X, kappa: int, s: SetSpec | None = None) -> WitnessCertificate:
    """Trace-normalized eigen truncation; bound ``sqrt(||R||_F^2 + ||R||_*^2)``."""
    A = np.asarray(X, dtype=float)
    s = s or SetSpec.density(A.shape[0])
    A = _sym_input(A, s)
    kappa = spectral.check_rank(kappa, A.shape)
    _, P, resid_f, resid_nuc = _eig_split(A, kappa)
    tr = float(np.trace(P))
    if tr <= 1e-14:
        raise InvalidInput("truncation has nonpositive trace; input is not a density matrix")
    W = P / tr
    upper = math.hypot(resid_f, resid_nuc)
    return _certificate(A, W, upper, spectral.tail_sum(A, kappa), s, "density:trace_normalized",
                        member(A, s, OMEGA_TOL), math.sqrt(2.0))


def witness_correlation(X, kappa: int, s: SetSpec | None = None) -> WitnessCertificate:
    """Diagonal rescaling ``D P D`` of the eigen truncation, or ``ee^T`` if some
    diagonal entry of the truncation vanishes."""
    A = np.asarray(X, dtype=float)
    s = s or SetSpec.correlation(A.shape[0])
    A = _sym_input(A, s)
    kappa = spectral.check_rank(kappa, A.shape)
    _, P, _, resid_nuc = _eig_split(A, kappa)
    d = np.diag(P).copy()
    if np.min(d) > DIAG_EPS:
        r = 1.0 / np.sqrt(d)
        W = P * np.outer(r, r)
        W = 0.5 * (W + W.T)
        W[np.diag_indices_from(W)] = 1.0
        form = "correlation:rescaled"
    else:
        W = np.ones_like(A)
        form = "correlation:all_ones"
    upper = s.constant_c * resid_nuc
    return _certificate(A, W, upper, spectral.tail_sum(A, kappa), s, form,
                        member(A, s, OMEGA_TOL), s.constant_c)


def diag_of_truncation(X, kappa: int) -> np.ndarray:
    """``1 - sum_{i>kappa} lambda_i u_ij^2`` for each j, i.e. ``diag`` of the
    eigen truncation of a correlation matrix."""
    sf = spectral.decompose(X, symmetric=True)
    U = sf.left[:, kappa:]
    return 1.0 - (U**2) @ sf.values[kappa:]


def local_feasibility_certificate(X, kappa: int, s: SetSpec) -> WitnessCertificate:
    if s.kind == "ball":
        return witness_ball(X, kappa, s)
    if s.kind == "density":
        return witness_density(X, kappa, s)
    return witness_correlation(X, kappa, s)
