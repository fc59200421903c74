import math

import mpmath
import numpy as np
import pytest

from valleyjump import LandscapeParams, oracle, theory
from valleyjump.landscape import barrier_height, valley_geometry


def test_effective_temperature_is_geometric_mean(params):
    d = theory.diffusion_and_temperature(params, 0.01, 2.0)
    geo = valley_geometry(params, 2.0)
    assert d.d11_flat == pytest.approx(2 * 0.01 / geo.f1)
    assert d.t_eff == pytest.approx(math.sqrt(d.d11_flat * d.d11_sharp))
    assert d.t_eff == pytest.approx(2 * 0.01 / math.sqrt(geo.f1 * geo.f2))


def test_tau_x_max(unit_params):
    big = theory.timescales(unit_params, 1e12)
    assert big.tau_x == pytest.approx(0.32, rel=1e-9)


def test_default_params_adiabatic(params):
    assert theory.timescale_ratio(params) < 0.05


def test_equilibrium_occupancy(params):
    assert theory.p_flat_equilibrium(params) == pytest.approx(0.8)


def test_steady_state_exceeds_equilibrium(params):
    for ds in np.logspace(-4, -1, 7):
        for y in (0.5, 2.0, 8.0):
            ss = theory.p_flat_steady(params, ds, y)
            assert ss.p_flat_ss > ss.p_flat_eq


def test_steady_state_against_mpmath(params):
    ds, y = 0.02, 1.5
    geo = valley_geometry(params, y)
    dl = barrier_height(params, y)
    a1 = mpmath.sqrt(dl * geo.f1 / (2 * ds))
    a2 = mpmath.sqrt(dl * geo.f2 / (2 * ds))
    ref = 1 / (1 + mpmath.erfi(a2) / (params.gamma * mpmath.erfi(a1)))
    assert theory.p_flat_steady(params, ds, y).p_flat_ss == pytest.approx(float(ref), rel=1e-13)


def test_steady_state_zero_y_limit(params):
    lim = 1 / (1 + params.gamma**-1.5)
    assert theory.p_flat_steady(params, 0.01, 0.0).p_flat_ss == pytest.approx(lim)
    assert theory.p_flat_steady(params, 0.01, 1e-7).p_flat_ss == pytest.approx(lim, rel=1e-6)


def test_mfpt_matches_erfi_formula(params):
    ds, y = 0.005, 3.0
    geo = valley_geometry(params, y)
    dl = barrier_height(params, y)
    m = theory.kramers_mfpt(params, ds, y)
    ref = mpmath.pi / 2 * geo.f1 * mpmath.erfi(mpmath.sqrt(dl * geo.f1 / (2 * ds)))
    assert m.flat_to_sharp == pytest.approx(float(ref), rel=1e-13)
    assert m.log_k_flat == pytest.approx(-m.log_flat_to_sharp)


def test_kramers_flat_direction_vs_quadrature(params):
    m = theory.kramers_mfpt(params, 0.01, 2.0)
    q = oracle.log_mfpt_quadrature(params, 0.01, 2.0, "flat_to_sharp")
    assert abs(math.expm1(m.log_flat_to_sharp - q)) < 0.10


def test_kramers_deep_barrier_both_directions(params):
    y = 3.0
    geo = valley_geometry(params, y)
    ds = barrier_height(params, y) * geo.f2 / (2 * 12.0)
    m = theory.kramers_mfpt(params, ds, y)
    assert m.in_regime
    for direction, val in (("flat_to_sharp", m.log_flat_to_sharp), ("sharp_to_flat", m.log_sharp_to_flat)):
        assert val == pytest.approx(oracle.log_mfpt_quadrature(params, ds, y, direction), abs=1e-3)


def test_regime_flag(params):
    y = 2.0
    geo = valley_geometry(params, y)
    dl = barrier_height(params, y)
    shallow = dl * geo.f2 / 2 / 0.5
    assert not theory.kramers_mfpt(params, shallow, y).in_regime
    assert theory.kramers_mfpt(params, shallow / 10, y).in_regime


def test_asymptotic_rates_close_to_exact_in_deep_barrier(params):
    y = 4.0
    geo = valley_geometry(params, y)
    ds = barrier_height(params, y) * geo.f2 / (2 * 30.0)
    lf, ls = theory.asymptotic_log_rates(params, ds, y)
    m = theory.kramers_mfpt(params, ds, y)
    assert lf == pytest.approx(m.log_k_flat, abs=0.02)
    assert ls == pytest.approx(m.log_k_sharp, abs=0.02)


def test_phi_constant(params):
    p = params
    ref = 2 * (p.x1**2 - p.x2**2) / (27 * p.y_b) * (p.L_d / p.y_d + 8 * p.x0**2 / (27 * p.y_f))
    assert theory.phi_constant(p) == pytest.approx(ref, rel=1e-15)


def test_freezing_point_formula(params):
    ds, eps = 1e-3, 0.01
    fp = theory.freezing_point(params, ds, eps)
    r = math.sqrt(ds * math.log(ds / (eps * fp.phi) ** 2))
    assert fp.in_regime
    assert fp.y_freeze == pytest.approx(params.y_b * r / (params.x2 - r))


def test_freezing_point_out_of_regime(params):
    assert not theory.freezing_point(params, 0.5).in_regime
    tiny = theory.freezing_point(params, 1e-12, 0.01)
    assert not tiny.in_regime and tiny.y_freeze == 0.0


def test_freezing_increasing_in_noise(params):
    ys = [theory.freezing_point(params, ds).y_freeze for ds in np.logspace(-6, -2.5, 20)]
    assert np.all(np.diff(ys) > 0)


def test_transient_equal_flatness_is_half():
    p = LandscapeParams(x1=0.6, x2=0.6)
    assert theory.p_flat_transient(p, 1e-3).p_flat_tr == pytest.approx(0.5)


def test_transient_formula(params):
    ds, eps = 1e-4, 0.01
    phi = theory.phi_constant(params)
    g = params.gamma
    ref = 1 / (1 + g**-0.5 * (math.sqrt(ds) / (eps * phi)) ** (1 - g))
    assert theory.p_flat_transient(params, ds, eps).p_flat_tr == pytest.approx(ref, rel=1e-12)


def test_predict_bundle(params):
    pr = theory.predict(params, 0.01, 2.0)
    assert pr.p_flat_ss == theory.p_flat_steady(params, 0.01, 2.0).p_flat_ss
    assert 0.5 <= pr.p_flat_tr <= 1.0


def test_log_escape_rates_vectorized(params):
    ys = np.array([0.5, 1.0, 4.0])
    lf, ls = theory.log_escape_rates(params, 0.01, ys)
    for i, y in enumerate(ys):
        m = theory.kramers_mfpt(params, 0.01, y)
        assert lf[i] == pytest.approx(m.log_k_flat, rel=1e-12)
        assert ls[i] == pytest.approx(m.log_k_sharp, rel=1e-12)


def test_noise_must_be_positive(params):
    with pytest.raises(ValueError):
        theory.kramers_mfpt(params, 0.0, 1.0)


@pytest.mark.parametrize("y", [1.0, 3.0, 8.0])
def test_asymptotic_rates_leading_order_gap(params, y):
    """The deep-barrier rate misses exactly erfi(a) sqrt(pi) a exp(-a^2) = 1 + 1/(2a^2) + ..."""
    geo = valley_geometry(params, y)
    for expo in (4.0, 8.0, 16.0):
        ds = barrier_height(params, y) * geo.f2 / (2 * expo)
        lf, ls = theory.asymptotic_log_rates(params, ds, y)
        m = theory.kramers_mfpt(params, ds, y)
        a = math.sqrt(expo)
        gap = float(mpmath.erfi(a) * mpmath.sqrt(mpmath.pi) * a * mpmath.exp(-expo))
        assert math.exp(ls - m.log_k_sharp) == pytest.approx(gap, rel=1e-12)
        if expo >= 8.0:
            assert abs(math.expm1(ls - m.log_k_sharp)) <= 0.10
            assert abs(math.expm1(lf - m.log_k_flat)) <= 0.10
