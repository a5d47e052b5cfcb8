"""Composite error bounds for the feasible set F and the solution set F*.

The exact nonconvex projection onto F is never formed.  Wherever a bound
involves it, the constructive witness is used instead; the same argument
goes through for any feasible point within ``c * tail`` of ``X``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .errors import MissingConstant
from .objectives import ObjectiveModel
from .sets import SetSpec, member, project
from .witness import OMEGA_TOL, local_feasibility_certificate

RIGOROUS = "rigorous"
CONDITIONAL = "conditional_on_theta_M"
DIAGNOSTIC = "diagnostic"
_RIGOR_ORDER = {RIGOROUS: 0, CONDITIONAL: 1, DIAGNOSTIC: 2}


def weaker(*labels):
    return max(labels, key=_RIGOR_ORDER.__getitem__)


@dataclass
class BoundTerm:
    name: str
    constant: float
    quantity: float

    @property
    def value(self) -> float:
        return self.constant * self.quantity


@dataclass
class BoundReport:
    target: str  # "feasible_set" | "solution_set"
    scope: str  # "local" | "global"
    terms: list = field(default_factory=list)
    rigor: str = RIGOROUS

    @property
    def value(self) -> float:
        return float(sum(t.value for t in self.terms))

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "scope": self.scope,
            "value": self.value,
            "rigor": self.rigor,
            "terms": [{"name": t.name, "constant": t.constant, "quantity": t.quantity}
                      for t in self.terms],
        }


def bound_feasible_local(X, kappa: int, s: SetSpec) -> BoundReport:
    A = s.check_shape(X)
    in_omega = member(A, s, OMEGA_TOL)
    tail = spectral.tail_sum(A, kappa)
    return BoundReport("feasible_set", "local", [BoundTerm("tail", s.constant_c, tail)],
                       RIGOROUS if in_omega else DIAGNOSTIC)


def bound_feasible_global(X, kappa: int, s: SetSpec, projection=None) -> BoundReport:
    A = s.check_shape(X)
    c = s.constant_c
    dist = (projection or project(A, s)).distance
    terms = [BoundTerm("dist_to_omega", 1.0 + c * math.sqrt(s.n), dist),
             BoundTerm("tail", c, spectral.tail_sum(A, kappa))]
    return BoundReport("feasible_set", "global", terms, RIGOROUS)


def _gradient_term(A, kappa, s, m: ObjectiveModel, xstar_surrogate):
    if m.rsc_theta is None:
        raise MissingConstant("solution-set bounds need rsc_theta")
    Y = local_feasibility_certificate(A, kappa, s).witness
    gY = m.gradient(Y)
    if m.grad_bound_M is not None:
        g = float(np.linalg.norm(gY)) + m.grad_bound_M
        rigor = CONDITIONAL
    elif xstar_surrogate is not None:
        g = float(np.linalg.norm(gY - m.gradient(xstar_surrogate)))
        rigor = DIAGNOSTIC
    else:
        raise MissingConstant("need grad_bound_M or an xstar surrogate")
    return BoundTerm("gradient", 1.0 / m.rsc_theta, g), rigor


def bound_solution_local(X, kappa: int, s: SetSpec, m: ObjectiveModel,
                         xstar_surrogate=None) -> BoundReport:
    """``c * tail + (1/theta) * ||grad f(Y) - grad f(X*)||`` with ``Y`` the witness.

    With ``grad_bound_M`` supplied, the unknown ``||grad f(X*)||`` is replaced
    by ``M``; otherwise ``xstar_surrogate`` stands in for ``X*`` and the
    report is only diagnostic.
    """
    A = s.check_shape(X)
    feas = bound_feasible_local(A, kappa, s)
    term, rigor = _gradient_term(A, kappa, s, m, xstar_surrogate)
    return BoundReport("solution_set", "local", feas.terms + [term], weaker(feas.rigor, rigor))


def bound_solution_global(X, kappa: int, s: SetSpec, m: ObjectiveModel,
                          xstar_surrogate=None) -> BoundReport:
    A = s.check_shape(X)
    proj = project(A, s)
    feas = bound_feasible_global(A, kappa, s, projection=proj)
    # the witness of the projected point is within the feasible-set bound of X
    term, rigor = _gradient_term(proj.point, kappa, s, m, xstar_surrogate)
    return BoundReport("solution_set", "global", feas.terms + [term], weaker(feas.rigor, rigor))


def xi_bound(X_l, rho_prev: float, m: ObjectiveModel, s: SetSpec, kappa: int,
             fstar_surrogate: float) -> float:
    """``2 sqrt(2 Lbar) / theta * sqrt(f(X_l) + rho_prev * tail + f*)``.

    The value is increasing in ``fstar_surrogate``, so any upper estimate of
    the optimal value (e.g. the best feasible value found) keeps it an
    upper bound.
    """
    if m.rsc_theta is None:
        raise MissingConstant("xi bound needs rsc_theta")
    _, Lbar = m.lipschitz_constants(s)
    inner = m.value(X_l) + rho_prev * spectral.tail_sum(X_l, kappa) + fstar_surrogate
    return 2.0 * math.sqrt(2.0 * Lbar) / m.rsc_theta * math.sqrt(max(inner, 0.0))
