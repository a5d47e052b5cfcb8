"""Grid-search global minimization at desk scale (n <= 3, kappa = 1).

Used to check exact-penalty claims: the minimum of ``f`` over the rank-one
feasible set against the minimum of ``f + rho * tail`` over all of Omega.
Values are upper bounds on the true minima, tight up to grid resolution.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import spectral
from .errors import Unsupported
from .objectives import ObjectiveModel
from .sets import SetSpec


@dataclass
class OracleConfig:
    set: SetSpec
    kappa: int = 1
    grid_density: int = 200
    refine_rounds: int = 3

    def __post_init__(self):
        if self.kappa != 1:
            raise Unsupported("the oracle only handles kappa = 1")
        if max(self.set.shape) > 3:
            raise Unsupported("the oracle only handles n <= 3")
        if self.set.kind == "ball" and self.set.norm != "frobenius":
            raise Unsupported("the oracle only handles Frobenius balls")


def _sphere(params):
    """Unit vector from hyperspherical angles."""
    params = np.atleast_1d(params)
    v, s = [], 1.0
    for a in params:
        v.append(s * np.cos(a))
        s *= np.sin(a)
    v.append(s)
    return np.array(v)


def _refine(fun, x, lo, hi, step, rounds):
    """Coordinate descent with shrinking step inside a box; never increases ``fun``."""
    x = np.array(x, dtype=float)
    best = fun(x)
    for _ in range(rounds):
        h = np.array(step, dtype=float)
        while np.max(h) > 1e-10:
            improved = False
            for i in range(len(x)):
                for sgn in (1.0, -1.0):
                    y = x.copy()
                    y[i] = np.clip(y[i] + sgn * h[i], lo[i], hi[i])
                    v = fun(y)
                    if v < best:
                        x, best, improved = y, v, True
            if not improved:
                h = h / 2.0
    return x, best


def _grid_min(fun, axes):
    best, arg = np.inf, None
    for p in itertools.product(*axes):
        v = fun(np.array(p))
        if v < best:
            best, arg = v, np.array(p)
    return arg, best


def brute_min_feasible(m: ObjectiveModel, cfg: OracleConfig):
    """Global minimum of ``f`` over ``Omega ∩ {rank <= 1}``; returns ``(point, value)``."""
    s, g = cfg.set, cfg.grid_density
    n1, n2 = s.shape
    if s.kind == "correlation":
        # rank-one correlation matrices are exactly v v^T with v in {-1, 1}^n
        best, arg = np.inf, None
        for signs in itertools.product((1.0, -1.0), repeat=n1 - 1):
            v = np.array((1.0,) + signs)
            X = np.outer(v, v)
            val = m.value(X)
            if val < best:
                best, arg = val, X
        return arg, float(best)

    if s.kind == "density":
        d = n1 - 1
        lo, hi = np.zeros(d), np.full(d, np.pi)
        if d > 1:
            hi[-1] = 2 * np.pi

        def build(p):
            u = _sphere(p)
            return np.outer(u, u)

        fun = lambda p: m.value(build(p))
        axes = [np.linspace(a, b, g) for a, b in zip(lo, hi)]
        p0, _ = _grid_min(fun, axes)
    else:
        # X = sigma u v^T; u ranges over a half sphere since (-u, -v) gives the same X
        d1, d2 = n1 - 1, n2 - 1
        lo = np.zeros(1 + d1 + d2)
        hi = np.concatenate([[s.gamma], np.full(d1 + d2, np.pi)])
        if d2:
            hi[-1] = 2 * np.pi

        def build(p):
            u = _sphere(p[1:1 + d1]) if d1 else np.ones(1)
            v = _sphere(p[1 + d1:]) if d2 else np.ones(1)
            return p[0] * np.outer(u, v)

        fun = lambda p: m.value(build(p))

        def best_sigma(angles):
            res = minimize_scalar(lambda r: fun(np.concatenate([[r], angles])),
                                  bounds=(0.0, s.gamma), method="bounded",
                                  options={"xatol": 1e-8})
            return res.fun, res.x

        per_dim = int(np.clip(round(g ** (1.5 / (d1 + d2))), 8, g))
        axes = [np.linspace(a, b, per_dim) for a, b in zip(lo[1:], hi[1:])]
        best, p0 = np.inf, None
        for angles in itertools.product(*axes):
            v, r = best_sigma(np.array(angles))
            if v < best:
                best, p0 = v, np.concatenate([[r], angles])
        axes = [[p0[0]]] + axes

    step = (hi - lo) / np.array([max(len(a), 2) for a in axes])
    p, val = _refine(fun, p0, lo, hi, step, cfg.refine_rounds)
    return build(p), float(val)


def brute_min_penalty(m: ObjectiveModel, rho: float, cfg: OracleConfig):
    """Global minimum of ``f + rho * tail`` over Omega for 2x2 density/correlation sets."""
    s, g = cfg.set, cfg.grid_density
    if s.shape != (2, 2) or s.kind == "ball":
        raise Unsupported("penalty oracle only handles Density(2) and Correlation(2)")
    kappa = cfg.kappa
    if s.kind == "density":
        # eigenvalues (t, 1 - t), eigenvector angle theta
        lo, hi = np.array([0.5, 0.0]), np.array([1.0, np.pi])

        def build(p):
            c, sn = np.cos(p[1]), np.sin(p[1])
            R = np.array([[c, -sn], [sn, c]])
            return (R * np.array([p[0], 1.0 - p[0]])) @ R.T
    else:
        lo, hi = np.array([-1.0]), np.array([1.0])

        def build(p):
            return np.array([[1.0, p[0]], [p[0], 1.0]])

    fun = lambda p: m.value(build(p)) + rho * spectral.tail_sum(build(p), kappa)
    axes = [np.linspace(a, b, g + 1) for a, b in zip(lo, hi)]
    p0, _ = _grid_min(fun, axes)
    step = (hi - lo) / g
    p, val = _refine(fun, p0, lo, hi, step, cfg.refine_rounds)
    return build(p), float(val)
