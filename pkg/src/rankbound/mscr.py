"""Multi-stage convex relaxation for ``min f(X) s.t. X in Omega, rank(X) <= kappa``.

Stage k: repair the current iterate into a feasible witness, take the Ky Fan
subgradient ``W^k`` at the witness, solve the convex stage problem with the
concave ``-||X||_kappa`` replaced by ``-<W^k, X>``, then update ``rho``.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .bounds import xi_bound
from .errors import InvalidInput, NumericalFailure
from .objectives import ObjectiveModel
from .sets import SetSpec, matrix_to_dict, project
from .subsolver import SubproblemSpec, solve_stage
from .witness import local_feasibility_certificate

log = logging.getLogger(__name__)

CSV_COLUMNS = ("k", "rho", "f_Xk", "f_Xhat", "tail", "penalty_value", "xi", "wall_ms")


@dataclass
class MscrConfig:
    objective: ObjectiveModel
    set: SetSpec
    kappa: int
    rho0: float | str = "auto"
    tau_schedule: float | list | str = 1.0
    max_stages: int = 50
    feas_tol: float = 1e-8
    obj_tol: float = 1e-8
    x0: object = "auto"
    seed: int = 0
    sub_tol: float = 1e-8
    sub_max_iter: int = 100_000
    record_time: bool = False

    def __post_init__(self):
        spectral.check_rank(self.kappa, self.set.shape)
        if not isinstance(self.rho0, str) and not self.rho0 > 0:
            raise InvalidInput("rho0 must be positive")
        if isinstance(self.tau_schedule, str):
            if self.tau_schedule != "geometric":
                raise InvalidInput("tau_schedule must be a number, a list or 'geometric'")
        elif np.any(np.asarray(self.tau_schedule, dtype=float) < 1):
            raise InvalidInput("every tau_k must be >= 1")
        if self.max_stages < 0:
            raise InvalidInput("max_stages must be nonnegative")


@dataclass
class StageRecord:
    k: int
    X: np.ndarray
    Xhat: np.ndarray
    w_fingerprint: str
    rho: float
    f_X: float
    f_Xhat: float
    tail: float
    penalty_value: float
    xi: float | None = None
    wall_ms: float = 0.0


@dataclass
class MscrTrace:
    stages: list = field(default_factory=list)
    best_point: np.ndarray | None = None
    best_value: float = math.inf
    stop_reason: str = ""
    rho_floor: float = 0.0  # rho_{-1} = c L

    def column(self, name):
        return [getattr(r, name) for r in self.stages]

    def xi_monotone(self, slack: float = 0.0):
        xi = self.column("xi")
        if not xi or xi[0] is None:
            return None
        return all(b <= a + slack for a, b in zip(xi, xi[1:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.stages:
            w.writerow([r.k, repr(r.rho), repr(r.f_X), repr(r.f_Xhat), repr(r.tail),
                        repr(r.penalty_value), "nan" if r.xi is None else repr(r.xi),
                        f"{r.wall_ms:.3f}"])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "best_value": self.best_value,
            "best_point": None if self.best_point is None else matrix_to_dict(self.best_point),
            "stages": len(self.stages),
            "stop_reason": self.stop_reason,
            "rho_final": self.stages[-1].rho if self.stages else None,
            "tail_final": self.stages[-1].tail if self.stages else None,
            "xi": self.column("xi"),
            "xi_monotone": self.xi_monotone(),
        }

    def to_json(self) -> str:
        rows = [{"k": r.k, "rho": r.rho, "f_Xk": r.f_X, "f_Xhat": r.f_Xhat, "tail": r.tail,
                 "penalty_value": r.penalty_value, "xi": r.xi, "wall_ms": r.wall_ms,
                 "w_fingerprint": r.w_fingerprint} for r in self.stages]
        return json.dumps({"summary": self.summary(), "stages": rows})


def exact_penalty_threshold(m: ObjectiveModel, s: SetSpec, kappa: int = 1) -> float:
    """``c * L``: above this, penalized and constrained problems share global minimizers."""
    L, _ = m.lipschitz_constants(s)
    return s.constant_c * L


def penalty_objective(X, rho: float, m: ObjectiveModel, kappa: int) -> float:
    return m.value(X) + rho * spectral.tail_sum(X, kappa)


def auto_rho0(m: ObjectiveModel, s: SetSpec, kappa: int, x0) -> float:
    """1.1 times the largest available lower-bound term on ``rho_0``."""
    c = s.constant_c
    L, Lbar = m.lipschitz_constants(s)
    xhat = local_feasibility_certificate(x0, kappa, s).witness
    terms = [c * L, m.value(xhat)]
    if m.rsc_theta is not None and Lbar > 0:
        terms.append(c**2 * (m.rsc_theta + Lbar) ** 2 / (4.0 * Lbar))
    else:
        log.info("rsc_theta unavailable: xi monotonicity is only checked empirically")
    top = max(terms)
    return 1.1 * top if top > 0 else 1.0


def _initial_point(cfg: MscrConfig):
    s = cfg.set
    if isinstance(cfg.x0, str):
        if cfg.x0 == "auto":
            return project(np.zeros(s.shape), s).point
        if cfg.x0 == "random":
            G = np.random.default_rng(cfg.seed).standard_normal(s.shape)
            if s.symmetric:
                G = 0.5 * (G + G.T)
            return project(G, s).point
        raise InvalidInput(f"unknown x0 option {cfg.x0!r}")
    return project(s.check_shape(cfg.x0), s).point


def _tau(cfg: MscrConfig, k: int, rho: float, threshold: float) -> float:
    sched = cfg.tau_schedule
    if sched == "geometric":
        return 2.0 if rho <= threshold else 1.0
    if np.ndim(sched) == 0:
        return float(sched)
    sched = list(sched)
    return float(sched[min(k, len(sched) - 1)]) if sched else 1.0


def _fingerprint(W) -> str:
    return hashlib.sha256(np.ascontiguousarray(W).tobytes()).hexdigest()[:16]


def run(cfg: MscrConfig) -> MscrTrace:
    """Run the staged relaxation and record one :class:`StageRecord` per iterate."""
    m, s, kappa = cfg.objective, cfg.set, cfg.kappa
    X = _initial_point(cfg)
    threshold = exact_penalty_threshold(m, s, kappa)
    rho = auto_rho0(m, s, kappa, X) if cfg.rho0 == "auto" else float(cfg.rho0)
    rho_prev = threshold
    trace = MscrTrace(rho_floor=threshold)

    k = 0
    t0 = time.perf_counter()
    while True:
        cert = local_feasibility_certificate(X, kappa, s)
        Xhat = cert.witness
        W = spectral.kyfan_subgradient(Xhat, kappa)
        f_X, f_hat = m.value(X), m.value(Xhat)
        tail = spectral.tail_sum(X, kappa)
        rec = StageRecord(k, X, Xhat, _fingerprint(W), rho, f_X, f_hat, tail,
                          f_X + rho_prev * tail)
        if cfg.record_time:
            rec.wall_ms = 1000.0 * (time.perf_counter() - t0)
        trace.stages.append(rec)
        if f_hat < trace.best_value:
            trace.best_value, trace.best_point = f_hat, Xhat

        if k >= 1:
            prev = trace.stages[-2].penalty_value
            rel = abs(rec.penalty_value - prev) / max(1.0, abs(prev))
            if tail <= cfg.feas_tol and rel <= cfg.obj_tol:
                trace.stop_reason = "converged"
                break
        if k >= cfg.max_stages:
            trace.stop_reason = "max_stages"
            break

        spec = SubproblemSpec(m, rho, W, s, tol=cfg.sub_tol, max_iter=cfg.sub_max_iter)
        try:
            res = solve_stage(spec, warm_start=X, fallback=Xhat)
        except NumericalFailure as e:
            trace.stop_reason = "numerical_failure"
            e.trace = trace  # partial trace for the caller
            raise
        if not res.converged:
            log.warning("stage %d subproblem did not converge (residual %.2e)", k, res.residual)
        X = res.point
        rho_prev = rho
        rho = _tau(cfg, k, rho, threshold) * rho
        k += 1

    if m.rsc_theta is not None:
        for rec, rp in zip(trace.stages, [threshold] + [r.rho for r in trace.stages[:-1]]):
            rec.xi = xi_bound(rec.X, rp, m, s, kappa, trace.best_value)
    return trace
