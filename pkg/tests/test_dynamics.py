import math

import numpy as np
import pytest

from valleyjump import DynamicsConfig, LandscapeParams, gradient, simulate
from valleyjump.dynamics import (DivergenceError, State, initial_state, make_rng, noise_covariance,
                                 noise_sqrt, step)


def test_config_validation():
    with pytest.raises(ValueError):
        DynamicsConfig(eta=0.0)
    with pytest.raises(ValueError):
        DynamicsConfig(sigma=-1.0)
    with pytest.raises(ValueError):
        DynamicsConfig(init_mode="middle")
    assert DynamicsConfig(eta=0.02, sigma=0.5).delta_s == pytest.approx(0.01)


def test_initial_state_modes():
    cfg = DynamicsConfig(init_mode="alternating", x_init_offset=0.05, y0=0.3)
    assert initial_state(cfg, 0) == State(0.05, 0.3)
    assert initial_state(cfg, 1) == State(-0.05, 0.3)
    assert initial_state(DynamicsConfig(init_mode="sharp_side"), 4).x < 0


@pytest.mark.parametrize("x,y", [(0.3, 1.0), (-0.2, 2.0), (0.0, 0.5), (-0.7, 10.0)])
def test_noise_sqrt_squares_to_clamped_covariance(params, x, y):
    s = noise_sqrt(params, x, y, 0.2)
    np.testing.assert_allclose(s @ s, noise_covariance(params, x, y, 0.2), atol=1e-13)
    np.testing.assert_allclose(s, s.T)
    assert np.all(np.linalg.eigvalsh(s) >= -1e-15)


def test_covariance_is_psd_even_where_hessian_is_not(params):
    # near the ridge at small y the y-curvature is negative
    h = noise_covariance(params, -0.5, 0.2, 1.0)
    assert np.all(np.linalg.eigvalsh(h) >= -1e-14)


def test_zero_noise_is_plain_gradient_descent(params):
    cfg = DynamicsConfig(eta=0.01, sigma=0.0, t_max=500, record_stride=500)
    rec = simulate(params, cfg)
    x, y = initial_state(cfg)
    for _ in range(500):
        g = gradient(params, x, y)
        x, y = x - 0.01 * g[0], abs(y - 0.01 * g[1])
    assert rec.final_state.x == pytest.approx(x, rel=1e-12)
    assert rec.final_state.y == pytest.approx(y, rel=1e-12)


def test_same_seed_same_trajectory(params):
    cfg = DynamicsConfig(sigma=0.5, t_max=20_000, seed=7)
    a, b = simulate(params, cfg), simulate(params, cfg)
    np.testing.assert_array_equal(a.states, b.states)
    np.testing.assert_array_equal(a.switches, b.switches)
    c = simulate(params, DynamicsConfig(sigma=0.5, t_max=20_000, seed=8))
    assert not np.array_equal(a.states, c.states)


def test_step_reproduces_simulate_stream(params):
    cfg = DynamicsConfig(sigma=0.8, t_max=40_000, seed=3, record_stride=40_000)
    rec = simulate(params, cfg)
    rng = make_rng(3)
    s = initial_state(cfg)
    for _ in range(cfg.t_max):
        s = step(params, cfg, s, rng)
    assert s == rec.final_state


def test_switch_times_are_sign_changes(params):
    cfg = DynamicsConfig(eta=0.05, sigma=2.0, t_max=3000, record_stride=1, y0=0.05)
    rec = simulate(params, cfg)
    x = rec.states[:, 1]
    side = np.where(x >= 0, 1, -1)
    expected = np.nonzero(np.diff(side))[0] + 1
    np.testing.assert_array_equal(rec.switches, rec.states[expected, 0].astype(int))
    assert rec.n_switches > 0
    assert rec.t_freeze == rec.switches[-1]


def test_y_stays_nonnegative(params):
    cfg = DynamicsConfig(eta=0.05, sigma=1.0, t_max=20_000, record_stride=1, y0=0.0)
    rec = simulate(params, cfg)
    assert rec.states[:, 2].min() >= 0.0


def test_clamped_y_does_not_move(params):
    cfg = DynamicsConfig(sigma=0.5, t_max=5000, clamp_y=True, y0=2.0, record_stride=10)
    rec = simulate(params, cfg)
    assert np.all(rec.states[:, 2] == 2.0)


def test_divergence_flagged_not_raised(params):
    cfg = DynamicsConfig(eta=5.0, sigma=0.0, t_max=1000, y0=3.0, x_init_offset=0.3)
    rec = simulate(params, cfg)
    assert rec.diverged
    assert not math.isfinite(rec.final_state.x) or abs(rec.final_state.x) > 100 * params.x1
    with pytest.raises(DivergenceError):
        s = State(0.3, 3.0)
        rng = make_rng(0)
        for _ in range(1000):
            s = step(params, cfg, s, rng)


def test_negative_start_rejected(params):
    with pytest.raises(ValueError):
        step(params, DynamicsConfig(), State(0.1, -1.0), make_rng(0))


def test_valley_label():
    assert State(0.0, 1.0).valley == "flat"
    assert State(-1e-9, 1.0).valley == "sharp"


def test_free_hopping_switches_grow_linearly(params):
    """Clamped low barrier: sign changes accumulate linearly in t_max.

    Raw sign changes include fast recrossings of the ridge, so their rate only
    bounds the two-state transition rate from above.
    """
    from valleyjump import theory
    from valleyjump.landscape import barrier_height, valley_geometry

    y, eta = 0.3, 0.005
    geo = valley_geometry(params, y)
    ds = barrier_height(params, y) * geo.f2 / (2 * 0.5)
    m = theory.kramers_mfpt(params, ds, y)
    kf, ks = math.exp(m.log_k_flat), math.exp(m.log_k_sharp)
    counts = []
    for t_max in (100_000, 200_000):
        cfg = DynamicsConfig(eta=eta, sigma=ds / eta, t_max=t_max, y0=y, clamp_y=True,
                             x_init_offset=geo.x1_star, seed=11, record_stride=t_max)
        counts.append(simulate(params, cfg).n_switches)
    assert counts[0] > 200
    assert counts[1] / counts[0] == pytest.approx(2.0, rel=0.1)
    assert counts[1] / (200_000 * eta) >= 2 * kf * ks / (kf + ks)
