"""Smooth convex objectives together with the constants the bounds consume.

Subclass :class:`ObjectiveModel` and implement ``value``, ``gradient`` and
``_analytic_constants`` to plug in a custom objective.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidInput
from .sets import SetSpec, matrix_to_dict


class ObjectiveModel:
    """Base class.

    ``rsc_theta`` (restricted strong convexity modulus) and ``grad_bound_M``
    (max gradient norm over the solution set) are never estimated; they are
    whatever the caller supplies.  ``lipschitz_f`` / ``lipschitz_grad``
    override the analytic constants when given.
    """

    def __init__(self, shape, rsc_theta=None, grad_bound_M=None,
                 lipschitz_f=None, lipschitz_grad=None):
        self.shape = tuple(int(d) for d in shape)
        if rsc_theta is not None and not rsc_theta > 0:
            raise InvalidInput("rsc_theta must be positive")
        if grad_bound_M is not None and grad_bound_M < 0:
            raise InvalidInput("grad_bound_M must be nonnegative")
        self.rsc_theta = rsc_theta
        self.grad_bound_M = grad_bound_M
        self.lipschitz_f = lipschitz_f
        self.lipschitz_grad = lipschitz_grad

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape != self.shape:
            raise InvalidInput(f"point shape {X.shape} does not match objective shape {self.shape}")
        return X

    def value(self, X) -> float:
        raise NotImplementedError

    def gradient(self, X) -> np.ndarray:
        raise NotImplementedError

    def _analytic_constants(self, s: SetSpec):
        raise NotImplementedError

    def lipschitz_constants(self, s: SetSpec):
        """``(L, Lbar)``: Lipschitz constants of ``f`` and of its gradient over ``s``."""
        L, Lbar = self._analytic_constants(s)
        if self.lipschitz_f is not None:
            L = float(self.lipschitz_f)
        if self.lipschitz_grad is not None:
            Lbar = float(self.lipschitz_grad)
        return L, Lbar


class MatrixDistance(ObjectiveModel):
    """``f(X) = 0.5 * ||X - M||_F^2``."""

    def __init__(self, M, **kw):
        self.M = np.array(M, dtype=float)
        super().__init__(self.M.shape, **kw)

    def value(self, X) -> float:
        return 0.5 * float(np.sum((self._check(X) - self.M) ** 2))

    def gradient(self, X) -> np.ndarray:
        return self._check(X) - self.M

    def _analytic_constants(self, s):
        return s.radius + float(np.linalg.norm(self.M)), 1.0

    def to_dict(self):
        return {"kind": "matrix_distance", "M": matrix_to_dict(self.M)}


class Quadratic(ObjectiveModel):
    """``f(X) = 0.5 * ||A vec(X) - b||^2`` with row-major ``vec``.

    ``A`` is an ``(m, n1*n2)`` array and ``b`` a length-``m`` vector.
    """

    def __init__(self, A, b, shape, **kw):
        super().__init__(shape, **kw)
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        self.b = np.asarray(b, dtype=float).ravel()
        n = self.shape[0] * self.shape[1]
        if self.A.shape != (self.b.size, n):
            raise InvalidInput(f"operator shape {self.A.shape} incompatible with b ({self.b.size}) "
                               f"and X {self.shape}")
        self._lbar = float(np.linalg.norm(self.A, 2) ** 2) if self.A.size else 0.0

    def residual(self, X):
        return self.A @ self._check(X).ravel() - self.b

    def value(self, X) -> float:
        r = self.residual(X)
        return 0.5 * float(r @ r)

    def gradient(self, X) -> np.ndarray:
        return (self.A.T @ self.residual(X)).reshape(self.shape)

    def _analytic_constants(self, s):
        g0 = float(np.linalg.norm(self.A.T @ self.b))
        return self._lbar * s.radius + g0, self._lbar

    def to_dict(self):
        return {"kind": "quadratic", "A": matrix_to_dict(self.A),
                "b": matrix_to_dict(self.b.reshape(-1, 1))}
