import numpy as np
import pytest

from vdsopt import transforms as tr
from vdsopt.coherence import CoherenceDiagonal, build_B
from vdsopt.profile_opt import (OptConfig, objective_value, optimize_profile,
                                optimize_profile_with_prior, p_step, q_step)


def diag_of(values):
    return CoherenceDiagonal(np.asarray(values, dtype=float), "max_row", "test")


def test_config_validation():
    with pytest.raises(ValueError):
        OptConfig(lam=0.0, m=8.0).validate(4)
    with pytest.raises(ValueError):
        OptConfig(tau=0.5, m=1.0).validate(4)   # N*tau > m


def test_q_step_matches_scalar_balance():
    # with a flat diagonal and flat p the optimum is a flat q solving
    # d*q + 2*lam*p*(p*q - 1) stationarity of the max/penalty trade-off
    n = 8
    d = diag_of(np.full(n, 0.25))
    p = np.full(n, 0.5)
    cfg = OptConfig(lam=0.05, m=4.0)
    q = q_step(p, d, cfg)
    assert np.allclose(q, q[0], atol=1e-8)
    # compare against a dense 1-d grid on the flat subspace
    grid = np.linspace(0.0, 4.0, 200001)
    vals = n * 0.05 * (0.5 * grid - 1.0) ** 2 + 0.25 * grid
    best = grid[np.argmin(vals)]
    assert abs(q[0] - best) <= 1e-3


def test_p_step_reaches_exact_inverse_when_feasible():
    q = np.array([2.0, 4.0, 8.0])
    cfg = OptConfig(m=1.0, tau=1e-3, inner_tol=1e-14, max_inner=20000)
    p = p_step(q, cfg, 3)
    # 1/q sums to 0.875 < m, inside the box, so the penalty reaches zero
    assert np.allclose(p, 1.0 / q, atol=1e-5)


def test_optimizer_monotone_descent_and_feasibility():
    pair = tr.BasisPair(tr.fourier(), tr.haar(), 64)
    B = build_B(pair)
    cfg = OptConfig(m=20.0)
    profile, trace = optimize_profile(B, cfg)
    obj = np.array(trace.objective)
    assert np.all(np.diff(obj) <= 10 * cfg.inner_tol * np.maximum(1, obj[:-1]))
    assert profile.p.min() >= cfg.tau - 1e-12
    assert profile.p.max() <= 1.0 + 1e-12
    assert profile.p.sum() <= cfg.m + 1e-9


def test_flat_diagonal_recovers_uniform_objective():
    n = 32
    d = diag_of(np.full(n, 1.0 / n))
    cfg = OptConfig(m=10.0)
    profile, trace = optimize_profile(d, cfg)
    p_flat = np.full(n, cfg.m / n)
    uniform_obj = objective_value(p_flat, 1.0 / p_flat, d.values, cfg.lam)
    assert trace.objective[-1] <= uniform_obj + 1e-4


def test_profile_tracks_diagonal_ordering():
    # larger diagonal entries should end up with larger sampling probability
    from scipy.stats import spearmanr
    pair = tr.BasisPair(tr.fourier(), tr.haar(), 128)
    B = build_B(pair)
    profile, _ = optimize_profile(B, OptConfig(m=40.0))
    rho = spearmanr(profile.p, B.values).statistic
    assert rho >= 0.9


def test_strict_admissibility_rescale():
    pair = tr.BasisPair(tr.fourier(), tr.haar(), 32)
    B = build_B(pair)
    profile, _ = optimize_profile(B, OptConfig(m=10.0),
                                  strict_admissibility=True)
    assert abs(profile.p.sum() - 10.0) <= 1e-8


def test_prior_variant_requires_support_avg():
    with pytest.raises(ValueError):
        optimize_profile_with_prior(diag_of(np.ones(4)), OptConfig(m=2.0))


def test_trace_csv(tmp_path):
    d = diag_of(np.array([0.4, 0.2, 0.1, 0.1]))
    _, trace = optimize_profile(d, OptConfig(m=2.0))
    path = tmp_path / "trace.csv"
    trace.save_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("iteration,objective")
    assert len(lines) == len(trace.objective) + 1
