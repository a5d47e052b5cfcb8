import math

import numpy as np
import pytest

from rankbound import (MatrixDistance, SetSpec, bound_feasible_global, bound_feasible_local,
                       bound_solution_global, bound_solution_local, local_feasibility_certificate,
                       project, spectral, xi_bound)
from rankbound.bounds import CONDITIONAL, DIAGNOSTIC, RIGOROUS
from rankbound.errors import MissingConstant
from samplers import all_sets, random_correlation, random_density, random_member, random_point


def test_feasible_local_examples():
    s = SetSpec.density(2)
    u = np.array([0.6, 0.8])
    assert bound_feasible_local(np.outer(u, u), 1, s).value <= 1e-12
    r = bound_feasible_local(np.diag([0.5, 0.5]), 1, s)
    assert r.value == pytest.approx(math.sqrt(2) * 0.5) and r.rigor == RIGOROUS
    assert local_feasibility_certificate(np.diag([0.5, 0.5]), 1, s).witness_distance <= r.value + 1e-12
    r = bound_feasible_local(np.array([[1.0, 0.6], [0.6, 1.0]]), 1, SetSpec.correlation(2))
    assert r.value == pytest.approx(2.0)


def test_feasible_local_outside_omega_is_diagnostic():
    r = bound_feasible_local(np.eye(2), 1, SetSpec.density(2))
    assert r.rigor == DIAGNOSTIC


def test_value_is_sum_of_terms():
    r = bound_feasible_global(np.eye(3) * 2, 1, SetSpec.density(3))
    assert r.value == pytest.approx(sum(t.constant * t.quantity for t in r.terms), abs=1e-12)
    d = r.to_dict()
    assert d["value"] == r.value and len(d["terms"]) == 2


@pytest.mark.parametrize("s", all_sets(4), ids=lambda s: f"{s.kind}-{s.norm}")
def test_global_reduces_to_local_on_omega(s):
    rng = np.random.default_rng(0)
    for _ in range(20):
        X = random_member(rng, s)
        g, loc = bound_feasible_global(X, 2, s).value, bound_feasible_local(X, 2, s).value
        assert g == pytest.approx(loc, abs=1e-7 * (1 + loc))


def test_global_density_proof_chain():
    s = SetSpec.density(2)
    X = np.eye(2)  # twice the center of the density set
    r = bound_feasible_global(X, 1, s)
    P = project(X, s).point
    W = local_feasibility_certificate(P, 1, s).witness
    chain = [np.linalg.norm(X - W),
             np.linalg.norm(X - P) + np.linalg.norm(P - W),
             np.linalg.norm(X - P) + s.constant_c * spectral.tail_sum(P, 1),
             np.linalg.norm(X - P) + s.constant_c * (math.sqrt(2) * np.linalg.norm(X - P)
                                                      + spectral.tail_sum(X, 1)),
             r.value]
    assert all(a <= b + 1e-12 for a, b in zip(chain, chain[1:]))


def test_global_rank_k_far_from_omega():
    s = SetSpec.correlation(3)
    X = 5 * np.outer([1.0, 2.0, 0.0], [1.0, 2.0, 0.0])
    r = bound_feasible_global(X, 1, s)
    assert r.terms[1].quantity <= 1e-12
    assert r.value == pytest.approx((1 + s.constant_c * math.sqrt(3)) * project(X, s).distance)


@pytest.mark.parametrize("s", all_sets(3), ids=lambda s: f"{s.kind}-{s.norm}")
def test_global_dominates_witness_distance(s):
    rng = np.random.default_rng(1)
    for _ in range(20):
        X = random_point(rng, s, scale=2.0)
        P = project(X, s).point
        W = local_feasibility_certificate(P, 1, s).witness
        assert np.linalg.norm(X - W) <= bound_feasible_global(X, 1, s).value + 1e-9


def test_monotone_in_tail_and_distance():
    s = SetSpec.density(3)
    rng = np.random.default_rng(2)
    X = random_density(rng, 3, rank=3)
    a = bound_feasible_global(X, 1, s).value
    b = bound_feasible_global(X * 2, 1, s).value
    assert b >= a


def _planted(rng, s, kappa):
    if s.kind == "density":
        M0 = random_density(rng, s.n, rank=kappa)
    elif s.kind == "correlation":
        M0 = random_correlation(rng, s.n, rank=kappa)
    else:
        M0 = rng.standard_normal((s.shape[0], kappa)) @ rng.standard_normal((kappa, s.shape[1]))
        M0 *= 0.8 * s.gamma / s.ball_norm(M0)
    return M0, MatrixDistance(M0, rsc_theta=1.0, grad_bound_M=0.0)


@pytest.mark.parametrize("s", all_sets(4), ids=lambda s: f"{s.kind}-{s.norm}")
def test_planted_solution_local(s):
    rng = np.random.default_rng(3)
    M0, m = _planted(rng, s, 2)
    for _ in range(1000):
        X = random_member(rng, s)
        r = bound_solution_local(X, 2, s, m)
        assert r.rigor == CONDITIONAL
        assert np.linalg.norm(X - M0) <= r.value + 1e-9


@pytest.mark.parametrize("s", all_sets(3), ids=lambda s: f"{s.kind}-{s.norm}")
def test_planted_solution_global(s):
    rng = np.random.default_rng(4)
    M0, m = _planted(rng, s, 1)
    for _ in range(50):
        X = random_point(rng, s, scale=1.5)
        assert np.linalg.norm(X - M0) <= bound_solution_global(X, 1, s, m).value + 1e-9


def test_solution_bound_at_feasible_point():
    s = SetSpec.density(3)
    M0 = np.diag([1.0, 0, 0])
    m = MatrixDistance(M0, rsc_theta=0.5, grad_bound_M=0.25)
    X = np.diag([0.0, 1.0, 0.0])
    r = bound_solution_local(X, 1, s, m)
    assert r.value == pytest.approx((np.linalg.norm(X - M0) + 0.25) / 0.5)
    assert bound_solution_local(M0, 1, s, m).value >= 0


def test_solution_bound_with_surrogate_is_diagnostic():
    s = SetSpec.density(3)
    M0 = np.diag([1.0, 0, 0])
    m = MatrixDistance(M0, rsc_theta=1.0)
    r = bound_solution_local(np.eye(3) / 3, 1, s, m, xstar_surrogate=M0)
    assert r.rigor == DIAGNOSTIC
    with pytest.raises(MissingConstant):
        bound_solution_local(np.eye(3) / 3, 1, s, m)
    with pytest.raises(MissingConstant):
        bound_solution_local(np.eye(3) / 3, 1, s, MatrixDistance(M0), xstar_surrogate=M0)


def test_xi_hand_values():
    s = SetSpec.ball("frobenius", 10.0, (2, 2))
    m = MatrixDistance(np.zeros((2, 2)), rsc_theta=1.0)
    # f = 1 at a rank-one point, tail 0.5 with rho 2 gives rho * tail = 1
    X = np.diag([math.sqrt(2), 0.5])
    f = m.value(X)
    assert f == pytest.approx(1.125)
    rho = (2.0 - f) / 0.5  # make f + rho * tail exactly 2
    assert xi_bound(X, rho, m, s, 1, 0.0) == pytest.approx(4.0)
    M0 = np.diag([1.0, 0.0])
    m0 = MatrixDistance(M0, rsc_theta=1.0)
    assert xi_bound(M0, 3.0, m0, s, 1, 0.0) == 0.0
    with pytest.raises(MissingConstant):
        xi_bound(M0, 3.0, MatrixDistance(M0), s, 1, 0.0)
