import math

import numpy as np
import pytest

from stablemaps import JumpPath, lamperti, lamperti_distance, qnd_estimator, \
    sample_xi


def _pure_drift(slope, horizon=60.0):
    return JumpPath(horizon=horizon, drift=slope)


def test_alpha_minus_one_linear_oracle():
    """xi(s) = -s gives X(t) = 1 - t, tau(t) = -log(1 - t), zeta = 1."""
    res = lamperti(_pure_drift(-1.0), -1.0, 1.0, [0.0, 0.25, 0.5, 0.9])
    assert np.allclose(res.values, [1.0, 0.75, 0.5, 0.1], atol=1e-9)
    assert res.lifetime == pytest.approx(1.0, rel=1e-6)
    expected_tau = [-math.log(1.0 - t) for t in (0.0, 0.25, 0.5, 0.9)]
    assert np.allclose(res.tau_grid, expected_tau, atol=1e-9)


def test_alpha_zero_is_exponential():
    res = lamperti(_pure_drift(-1.0, 3.0), 0.0, 2.0, [0.0, 1.0, 2.5])
    assert np.allclose(res.values, 2.0 * np.exp([-0.0, -1.0, -2.5]))
    assert math.isinf(res.lifetime)


def test_cemetery_after_lifetime():
    res = lamperti(_pure_drift(-1.0), -1.0, 1.0, [0.5, 1.5])
    assert res.values[1] == 0.0
    assert math.isinf(res.tau_grid[1])


def test_scaling_identity_pathwise(rng):
    """X from 2x at time t equals 2 X from x at t/2 on a shared xi."""
    xi = sample_xi(40.0, 5e-3, rng)
    t = 0.6
    a = lamperti(xi, -1.0, 2.0, [t], rng=np.random.default_rng(1))
    b = lamperti(xi, -1.0, 1.0, [t / 2.0], rng=np.random.default_rng(1))
    assert a.values[0] == pytest.approx(2.0 * b.values[0], rel=1e-9, abs=1e-12)
    assert a.lifetime == pytest.approx(2.0 * b.lifetime, rel=1e-6)


def test_lifetime_mean_is_half_pi(rng):
    """E[zeta | X(0) = 1] = pi/2 (reciprocal of the cumulant at 1)."""
    n = 500
    z = np.empty(n)
    for i in range(n):
        xi = sample_xi(24.0, 5e-3, rng)
        z[i] = lamperti(xi, -1.0, 1.0, [0.0], rng=rng).lifetime
    se = z.std(ddof=1) / math.sqrt(n)
    assert abs(z.mean() - math.pi / 2.0) < 5.0 * se


def test_qnd_estimator_counts_band():
    jt = np.asarray([0.1, 0.2, 0.3, 0.4])
    js = np.asarray([0.05, -0.15, 0.11, 0.3])
    # band [0.1, 0.2]: the jumps at times 0.2 and 0.3 qualify
    assert qnd_estimator((jt, js), 0.35, 0.1) == pytest.approx(0.2)
    assert qnd_estimator((jt, js), 0.25, 0.1) == pytest.approx(0.1)
    assert qnd_estimator((jt, js), 0.15, 0.1) == 0.0
    with pytest.raises(ValueError):
        qnd_estimator((jt, js), 0.5, 0.0)


def test_lamperti_distance_piecewise_constant():
    path = JumpPath(horizon=2.0, start=2.0,
                    jump_times=np.asarray([1.0]),
                    jump_sizes=np.asarray([2.0]))
    # Y = 2 on [0,1), 4 on [1,2): int_0^1.5 dt/Y = 0.5 + 0.125
    assert lamperti_distance(path, 1.5) == pytest.approx(0.625)
