"""Convex stage problem ``min_{X in Omega} f(X) + rho (||X||_* - <W, X>)``.

Solved by Davis-Yin three-operator splitting: the smooth part is
``f - rho <W, .>``, the two proximal parts are ``rho ||.||_*`` (singular
value soft-thresholding) and the indicator of Omega (projection).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import InvalidInput, NumericalFailure
from .objectives import ObjectiveModel
from .sets import SetSpec, project

log = logging.getLogger(__name__)


def svt(X, tau: float) -> np.ndarray:
    """Proximal map of ``tau * ||.||_*``: shrink every singular value by ``tau``."""
    if tau < 0:
        raise InvalidInput("threshold must be nonnegative")
    sf = spectral.decompose(X)
    s = np.maximum(sf.values - tau, 0.0)
    k = int(np.count_nonzero(s))
    return (sf.left[:, :k] * s[:k]) @ sf.right[:, :k].T


@dataclass
class SubproblemSpec:
    objective: ObjectiveModel
    rho: float
    W: np.ndarray
    set: SetSpec
    tol: float = 1e-8
    max_iter: int = 100_000

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=float)
        if self.rho < 0:
            raise InvalidInput("rho must be nonnegative")
        if self.W.shape != tuple(self.set.shape):
            raise InvalidInput("W shape does not match the set")
        if self.W.size and np.linalg.norm(self.W, 2) > 1 + 1e-10:
            raise InvalidInput("W must have spectral norm at most 1")

    def stage_value(self, X) -> float:
        return (self.objective.value(X)
                + self.rho * (spectral.nuclear_norm(X) - float(np.sum(self.W * X))))


@dataclass
class SubproblemResult:
    point: np.ndarray
    objective_value: float
    residual: float
    iterations: int
    converged: bool


def _davis_yin(spec, z, step):
    s, m, rho = spec.set, spec.objective, spec.rho
    shift = rho * spec.W
    residual, it = np.inf, 0
    for it in range(1, spec.max_iter + 1):
        x_g = project(z, s).point
        x_h = svt(2.0 * x_g - z - step * (m.gradient(x_g) - shift), step * rho)
        diff = x_h - x_g
        z = z + diff
        residual = float(np.linalg.norm(diff))
        if not np.isfinite(residual):
            raise NumericalFailure(f"non-finite iterate at iteration {it}")
        if residual <= spec.tol:
            break
    return project(z, s).point, residual, it


def _projected_gradient(spec, x, step):
    # on PSD sets ||X||_* = tr(X), so the stage objective is smooth plus the indicator
    s, m = spec.set, spec.objective
    shift = spec.rho * (np.eye(s.n) - spec.W)
    x = project(x, s).point
    y, t = x, 1.0
    value = np.inf
    residual, it = np.inf, 0
    for it in range(1, spec.max_iter + 1):
        x_new = project(y - step * (m.gradient(y) + shift), s).point
        residual = float(np.linalg.norm(x_new - y))
        if not np.isfinite(residual):
            raise NumericalFailure(f"non-finite iterate at iteration {it}")
        new_value = m.value(x_new) + float(np.sum(shift * x_new))
        if residual <= spec.tol:
            x = x_new
            break
        if new_value > value:
            # restart the momentum when the objective goes up
            y, t = x, 1.0
            continue
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, t, value = x_new, t_new, new_value
    return x, residual, it


def solve_stage(spec: SubproblemSpec, warm_start=None, fallback=None) -> SubproblemResult:
    """Approximately minimize the stage objective over Omega.

    Ball sets use Davis-Yin splitting with the projection onto Omega and
    singular value thresholding as the two proximal maps.  Density and
    correlation sets use accelerated projected gradient on
    ``f + rho <I - W, .>``.  Both stop when their fixed-point residual drops to
    ``spec.tol``; the returned point is always a projection, hence in Omega.
    If ``fallback`` (a point of Omega) or the projected warm start has a
    lower stage value than the final iterate, that point is returned instead.
    """
    s, m = spec.set, spec.objective
    _, lbar = m.lipschitz_constants(s)
    # any positive step is admissible when the gradient is constant
    step = 1.0 / lbar if lbar > 0 else 1.0
    z = np.zeros(s.shape) if warm_start is None else np.array(warm_start, dtype=float)
    if s.symmetric:
        x, residual, it = _projected_gradient(spec, z, step)
    else:
        x, residual, it = _davis_yin(spec, z, step)
    converged = residual <= spec.tol
    if not converged:
        log.warning("stage solve stopped at max_iter=%d, residual %.3e", spec.max_iter, residual)

    point, value = x, spec.stage_value(x)
    candidates = [fallback]
    if warm_start is not None:
        candidates.append(project(warm_start, s).point)
    for cand in candidates:
        if cand is None:
            continue
        v = spec.stage_value(cand)
        if v < value:
            point, value = np.asarray(cand, dtype=float), v
    return SubproblemResult(point, value, residual, it, converged)
