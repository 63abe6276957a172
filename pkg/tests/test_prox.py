"""Projection/prox operators checked against dense convex-programming oracles."""

import cvxpy as cp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vdsopt.prox import (EmptyFeasibleSetError, WeightedL1Ball, project_box,
                         project_K_tau, project_l1_ball,
                         project_weighted_l1_ball, prox_weighted_linf)

ORACLE_TOL = 1e-6


SOLVER_OPTS = dict(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12,
                   tol_feas=1e-12)


def solve_qp(x, constraints_fn):
    z = cp.Variable(len(x))
    cons = constraints_fn(z)
    prob = cp.Problem(cp.Minimize(cp.sum_squares(z - x)), cons)
    prob.solve(**SOLVER_OPTS)
    assert prob.status in ("optimal", "optimal_inaccurate")
    return z.value


def test_project_l1_ball_oracle():
    g = np.random.default_rng(0)
    for _ in range(100):
        n = g.integers(2, 7)
        x = g.standard_normal(n) * 3
        r = float(g.random() * 2 + 0.1)
        got = project_l1_ball(x, r)
        want = solve_qp(x, lambda z: [cp.norm1(z) <= r])
        assert np.max(np.abs(got - want)) <= ORACLE_TOL
        assert np.abs(got).sum() <= r + 1e-10


def test_project_weighted_l1_ball_oracle():
    g = np.random.default_rng(1)
    for _ in range(100):
        n = g.integers(2, 7)
        x = g.standard_normal(n) * 3
        w = g.random(n) + 0.1
        r = float(g.random() * 2 + 0.1)
        ball = WeightedL1Ball(w, r)
        got = project_weighted_l1_ball(x, ball)
        want = solve_qp(x, lambda z: [w @ cp.abs(z) <= r])
        assert np.max(np.abs(got - want)) <= ORACLE_TOL
        assert ball.contains(got, tol=1e-10)


def test_prox_weighted_linf_oracle():
    g = np.random.default_rng(2)
    for _ in range(100):
        n = g.integers(2, 7)
        q = g.standard_normal(n) * 2
        d = g.random(n) + 0.1
        gamma = float(g.random() + 0.05)
        got = prox_weighted_linf(q, gamma, d)
        z = cp.Variable(n)
        prob = cp.Problem(cp.Minimize(
            gamma * cp.max(cp.multiply(d, cp.abs(z)))
            + 0.5 * cp.sum_squares(z - q)))
        prob.solve(**SOLVER_OPTS)
        assert np.max(np.abs(got - prob.variables()[0].value)) <= ORACLE_TOL


def test_project_K_tau_oracle():
    g = np.random.default_rng(3)
    for _ in range(100):
        n = int(g.integers(2, 7))
        x = g.standard_normal(n) * 2
        tau = float(g.random() * 0.2 + 1e-3)
        m = float(n * tau + g.random() * (n - n * tau))
        got = project_K_tau(x, tau, m)
        want = solve_qp(x, lambda z: [z >= tau, z <= 1, cp.sum(z) <= m])
        # compare objective values: ties in the oracle's tolerance can move
        # the argmin slightly without changing optimality
        assert np.sum((got - x) ** 2) <= np.sum((want - x) ** 2) + ORACLE_TOL
        assert got.min() >= tau - 1e-12
        assert got.max() <= 1 + 1e-12
        assert got.sum() <= m + 1e-9


def test_project_K_tau_idempotent_and_infeasible():
    x = np.array([0.2, 0.4, 0.1])
    p = project_K_tau(x, 0.05, 0.9)
    assert np.allclose(project_K_tau(p, 0.05, 0.9), p, atol=1e-12)
    with pytest.raises(EmptyFeasibleSetError):
        project_K_tau(x, 0.5, 1.0)


def test_project_box():
    assert np.allclose(project_box([-1.0, 0.5, 2.0], 0.0, 1.0),
                       [0.0, 0.5, 1.0])
    with pytest.raises(ValueError):
        project_box([0.0], 1.0, 0.0)


def test_weighted_ball_validation():
    with pytest.raises(ValueError):
        WeightedL1Ball(np.array([1.0, 0.0]), 1.0)
    with pytest.raises(ValueError):
        WeightedL1Ball(np.array([1.0, 1.0]), 0.0)


finite_vectors = arrays(np.float64, st.integers(2, 12),
                        elements=st.floats(-10, 10, allow_nan=False))


@settings(max_examples=50, deadline=None)
@given(x=finite_vectors, r=st.floats(0.1, 5.0))
def test_l1_projection_properties(x, r):
    z = project_l1_ball(x, r)
    assert np.abs(z).sum() <= r + 1e-9
    # idempotent and never farther from x than the scaled feasible point
    assert np.allclose(project_l1_ball(z, r), z, atol=1e-9)
    feasible = x * (r / max(np.abs(x).sum(), r))
    assert np.linalg.norm(z - x) <= np.linalg.norm(feasible - x) + 1e-9


@settings(max_examples=50, deadline=None)
@given(x=finite_vectors, tau=st.floats(1e-3, 0.2), slack=st.floats(0.0, 1.0))
def test_K_tau_projection_properties(x, tau, slack):
    n = len(x)
    m = n * tau + slack * n * (1.0 - tau)
    z = project_K_tau(x, tau, m)
    assert z.min() >= tau - 1e-12 and z.max() <= 1.0 + 1e-12
    assert z.sum() <= m + 1e-9
    assert np.allclose(project_K_tau(z, tau, m), z, atol=1e-9)


def test_interior_points_are_fixed():
    g = np.random.default_rng(4)
    x = g.random(5) * 0.1 + 0.2   # well inside [tau, 1] with small sum
    assert np.allclose(project_K_tau(x, 0.01, 5.0), x)
    assert np.allclose(project_l1_ball(x, 10.0), x)
