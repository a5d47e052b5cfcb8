import csv
import io
import math

import numpy as np
import pytest

from rankbound import (MatrixDistance, MscrConfig, Quadratic, SetSpec, auto_rho0,
                       exact_penalty_threshold, penalty_objective, run, spectral)
from rankbound.errors import InvalidInput
from rankbound.mscr import CSV_COLUMNS
from checks import trace_violations
from samplers import random_correlation

M_DENS = np.diag([0.7, 0.2, 0.1])


def test_threshold_examples():
    s = SetSpec.density(3)
    assert exact_penalty_threshold(MatrixDistance(M_DENS), s) == pytest.approx(
        math.sqrt(2) * (1 + math.sqrt(0.54)))
    assert exact_penalty_threshold(MatrixDistance(M_DENS), s) == pytest.approx(2.4534, abs=1e-4)
    q = Quadratic(np.zeros((1, 4)), np.zeros(1), (2, 2))
    assert exact_penalty_threshold(q, SetSpec.ball("frobenius", 2.0, (2, 2))) == 0
    ball = SetSpec.ball("frobenius", 1.7, (3, 3))
    assert exact_penalty_threshold(MatrixDistance(np.zeros((3, 3))), ball) == pytest.approx(1.7)


def test_auto_rho0():
    s = SetSpec.density(3)
    m = MatrixDistance(M_DENS, rsc_theta=1.0)
    r = auto_rho0(m, s, 1, np.eye(3) / 3)
    assert r >= 1.1 * 2.4534 - 1e-4
    assert r == pytest.approx(1.1 * max(math.sqrt(2) * (1 + math.sqrt(0.54)), 2 * 4 / 4))
    cfg = MscrConfig(m, s, 1, rho0=7.0, max_stages=0)
    assert run(cfg).stages[0].rho == 7.0


def test_penalty_objective():
    m = Quadratic(np.zeros((1, 9)), np.zeros(1), (3, 3))
    assert penalty_objective(np.diag([3.0, 2.0, 1.0]), 10.0, m, 2) == pytest.approx(10.0)
    u = np.array([1.0, 0, 0])
    assert penalty_objective(np.outer(u, u), 5.0, MatrixDistance(M_DENS), 1) == pytest.approx(
        MatrixDistance(M_DENS).value(np.outer(u, u)))
    rng = np.random.default_rng(0)
    X = rng.standard_normal((3, 3))
    sv = np.linalg.svd(X, compute_uv=False)
    assert penalty_objective(X, 2.0, MatrixDistance(M_DENS), 1) == pytest.approx(
        0.5 * np.sum((X - M_DENS) ** 2) + 2.0 * sv[1:].sum())


def test_config_validation():
    m, s = MatrixDistance(M_DENS), SetSpec.density(3)
    for kw in ({"rho0": -1.0}, {"tau_schedule": 0.5}, {"tau_schedule": "linear"}, {"max_stages": -1}):
        with pytest.raises(InvalidInput):
            MscrConfig(m, s, 1, **kw)
    with pytest.raises(InvalidInput):
        MscrConfig(m, s, 4)


def test_start_at_solution_stops_immediately():
    M0 = np.diag([1.0, 0, 0])
    tr = run(MscrConfig(MatrixDistance(M0), SetSpec.density(3), 1, x0=M0))
    assert len(tr.stages) == 2 and tr.stop_reason == "converged"
    assert tr.best_value == 0


def test_planted_density_recovery():
    M0 = np.diag([1.0, 0, 0])
    tr = run(MscrConfig(MatrixDistance(M0, rsc_theta=1.0), SetSpec.density(3), 1))
    assert tr.best_value <= 1e-6
    assert np.linalg.norm(tr.best_point - M0) <= 1e-3


def test_density_matches_oracle_value():
    tr = run(MscrConfig(MatrixDistance(M_DENS), SetSpec.density(3), 1))
    assert tr.best_value == pytest.approx(0.07, abs=1e-3)


def test_max_stages_zero():
    tr = run(MscrConfig(MatrixDistance(M_DENS), SetSpec.density(3), 1, max_stages=0))
    assert len(tr.stages) == 1 and tr.stop_reason == "max_stages"
    np.testing.assert_allclose(tr.stages[0].X, np.eye(3) / 3)


def _instances():
    rng = np.random.default_rng(1)
    yield SetSpec.density(4), MatrixDistance(np.diag([0.5, 0.3, 0.15, 0.05]), rsc_theta=1.0), 1
    yield SetSpec.correlation(4), MatrixDistance(random_correlation(rng, 4, rank=4), rsc_theta=1.0), 2
    ball = SetSpec.ball("frobenius", 1.0, (4, 3))
    yield ball, MatrixDistance(rng.standard_normal((4, 3)), rsc_theta=1.0), 1
    yield SetSpec.ball("nuclear", 2.0, (3, 3)), MatrixDistance(rng.standard_normal((3, 3)), rsc_theta=1.0), 1


@pytest.mark.parametrize("s,m,kappa", list(_instances()), ids=lambda v: getattr(v, "kind", None))
def test_trace_invariants(s, m, kappa):
    cfg = MscrConfig(m, s, kappa, max_stages=15, x0="random", seed=3)
    tr = run(cfg)
    assert trace_violations(tr, s, kappa, 10 * cfg.sub_tol) == []
    for r in tr.stages:
        assert r.f_X == pytest.approx(m.value(r.X), abs=1e-10)
        assert r.tail == pytest.approx(spectral.tail_sum(r.X, kappa), abs=1e-10)


def test_geometric_schedule_reaches_threshold():
    m, s = MatrixDistance(M_DENS), SetSpec.density(3)
    tr = run(MscrConfig(m, s, 1, rho0=0.1, tau_schedule="geometric", max_stages=10))
    rhos = tr.column("rho")
    assert all(b >= a for a, b in zip(rhos, rhos[1:]))
    assert rhos[-1] > exact_penalty_threshold(m, s)


def test_csv_and_json_serialization():
    tr = run(MscrConfig(MatrixDistance(M_DENS, rsc_theta=1.0), SetSpec.density(3), 1, max_stages=3))
    rows = list(csv.reader(io.StringIO(tr.to_csv())))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == len(tr.stages) + 1
    assert float(rows[1][1]) == tr.stages[0].rho
    import json
    doc = json.loads(tr.to_json())
    assert doc["summary"]["stages"] == len(tr.stages)
    assert doc["summary"]["xi_monotone"] is True


def test_run_is_deterministic():
    cfg = lambda: MscrConfig(MatrixDistance(M_DENS), SetSpec.correlation(3), 1, x0="random", seed=9,
                             max_stages=5)
    assert run(cfg()).to_csv() == run(cfg()).to_csv()
