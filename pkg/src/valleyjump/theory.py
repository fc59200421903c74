"""Closed-form predictions for the two-valley model.

Everything that can overflow (MFPTs, escape rates, erfi ratios) is carried
in log space; plain values are materialized only for reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from . import specialfn
from .landscape import LandscapeParams, barrier_height, drift_offset, valley_geometry, _check_y

DEFAULT_EPSILON = 0.01


class Diffusion(NamedTuple):
    d11_flat: float
    d11_sharp: float
    t_eff: float


class Timescales(NamedTuple):
    tau_x: float  # flatter branch, the slower transverse relaxation
    tau_y: float
    tau_x_sharp: float


class Mfpt(NamedTuple):
    log_flat_to_sharp: float
    log_sharp_to_flat: float
    in_regime: bool

    @property
    def flat_to_sharp(self) -> float:
        return _exp(self.log_flat_to_sharp)

    @property
    def sharp_to_flat(self) -> float:
        return _exp(self.log_sharp_to_flat)

    @property
    def log_k_flat(self) -> float:
        """Escape rate out of the flat valley, k+ = 1 / tau(f->s)."""
        return -self.log_flat_to_sharp

    @property
    def log_k_sharp(self) -> float:
        return -self.log_sharp_to_flat


class SteadyState(NamedTuple):
    p_flat_eq: float
    p_flat_ss: float


class FreezingPoint(NamedTuple):
    y_freeze: float
    phi: float
    in_regime: bool


class Transient(NamedTuple):
    p_flat_tr: float
    p_flat_tr_chain: float  # evaluated through y_freeze, for cross-checking
    y_freeze: float
    in_regime: bool


def _exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def _logistic_of_neg(log_w: float) -> float:
    """1 / (1 + exp(log_w)) evaluated without overflow."""
    if log_w > 0:
        e = math.exp(-log_w)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(log_w))


def _check_noise(delta_s: float, strict: bool = False):
    if strict and not delta_s > 0:
        raise ValueError(f"delta_s > 0 required (got {delta_s!r})")
    if delta_s < 0:
        raise ValueError(f"delta_s >= 0 required (got {delta_s!r})")


def diffusion_and_temperature(params: LandscapeParams, delta_s: float, y: float) -> Diffusion:
    _check_noise(delta_s)
    geo = valley_geometry(params, y)
    if geo.f1 <= 0 or geo.f2 <= 0:
        raise ZeroDivisionError("valley flatness vanished")
    return Diffusion(2 * delta_s / geo.f1, 2 * delta_s / geo.f2,
                     2 * delta_s / math.sqrt(geo.f1 * geo.f2))


def drift_rate(params: LandscapeParams, y: float) -> float:
    """|dy/dt| along a valley floor: the slope of L0(y) - barrier(y)."""
    _check_y(y)
    p = params
    return (p.L_d / p.y_d * math.exp(-y / p.y_d)
            + 2 * p.x0**2 * p.y_f * y / (p.f0 * (y + p.y_f) ** 3))


def timescales(params: LandscapeParams, y: float) -> Timescales:
    geo = valley_geometry(params, y)
    rate = drift_rate(params, y)
    tau_y = math.inf if rate == 0 else 1.0 / rate
    return Timescales(0.5 * geo.f1, tau_y, 0.5 * geo.f2)


def timescale_ratio(params: LandscapeParams, y_max: float = 200.0, n: int = 20001) -> float:
    """max over y of tau_x divided by min over y of tau_y, on [0, y_max]."""
    import numpy as np

    ys = np.linspace(0.0, y_max, n)
    tx = max(timescales(params, float(y)).tau_x for y in ys)
    ty = min(timescales(params, float(y)).tau_y for y in ys)
    # the flatter branch approaches its asymptote from below or above
    tx = max(tx, 0.5 * params.f0 * (params.x1 / params.x0) ** 2)
    return tx / ty


def kramers_exponents(params: LandscapeParams, delta_s: float, y: float) -> tuple[float, float]:
    """Squared erfi arguments barrier*f/(2 delta_s) for the flat and sharp valleys."""
    _check_noise(delta_s, strict=True)
    geo = valley_geometry(params, y)
    dl = barrier_height(params, y)
    return dl * geo.f1 / (2 * delta_s), dl * geo.f2 / (2 * delta_s)


def kramers_regime(params: LandscapeParams, delta_s: float, y: float) -> tuple[bool, bool]:
    """Whether delta_s sits below (1/2)(x_i y/(y + y_b))**2 for each valley."""
    s = y / (y + params.y_b)
    return (delta_s < 0.5 * (params.x1 * s) ** 2,
            delta_s < 0.5 * (params.x2 * s) ** 2)


def kramers_mfpt(params: LandscapeParams, delta_s: float, y: float) -> Mfpt:
    """Mean first-passage times from each valley floor to the ridge.

    tau = (pi/2) f erfi(sqrt(barrier f / (2 delta_s))), in log form.
    """
    if not y > 0:
        raise ValueError(f"kramers_mfpt needs y > 0 (got {y!r})")
    geo = valley_geometry(params, y)
    e1, e2 = kramers_exponents(params, delta_s, y)
    log_fs = math.log(0.5 * math.pi * geo.f1) + specialfn.log_erfi(math.sqrt(e1))
    log_sf = math.log(0.5 * math.pi * geo.f2) + specialfn.log_erfi(math.sqrt(e2))
    flat_ok, sharp_ok = kramers_regime(params, delta_s, y)
    return Mfpt(log_fs, log_sf, flat_ok and sharp_ok)


def asymptotic_log_rates(params: LandscapeParams, delta_s: float, y: float) -> tuple[float, float]:
    """Deep-barrier escape rates (log k+, log k-) from erfi(z) ~ e^{z^2}/(sqrt(pi) z)."""
    geo = valley_geometry(params, y)
    dl = barrier_height(params, y)
    out = []
    for f in (geo.f1, geo.f2):
        out.append(0.5 * math.log(2 * dl / (math.pi * delta_s * f)) - dl * f / (2 * delta_s))
    return out[0], out[1]


def p_flat_equilibrium(params: LandscapeParams) -> float:
    return params.gamma / (1.0 + params.gamma)


def p_flat_steady(params: LandscapeParams, delta_s: float, y: float) -> SteadyState:
    """Quasi-steady flat-valley occupancy k- / (k- + k+) at fixed y."""
    _check_noise(delta_s, strict=True)
    p_eq = p_flat_equilibrium(params)
    if y == 0:
        return SteadyState(p_eq, 1.0 / (1.0 + params.gamma ** -1.5))
    _check_y(y)
    e1, e2 = kramers_exponents(params, delta_s, y)
    if e1 == 0.0:
        return SteadyState(p_eq, 1.0 / (1.0 + params.gamma ** -1.5))
    log_w = -math.log(params.gamma) + specialfn.log_erfi_ratio(math.sqrt(e2), math.sqrt(e1))
    return SteadyState(p_eq, _logistic_of_neg(log_w))


def p_flat_steady_approx(params: LandscapeParams, delta_s: float, y: float) -> float:
    """Exponential (deep-barrier) form of the quasi-steady occupancy."""
    _check_noise(delta_s, strict=True)
    geo = valley_geometry(params, y)
    dl = barrier_height(params, y)
    log_w = -0.5 * math.log(params.gamma) + dl * (geo.f2 - geo.f1) / (2 * delta_s)
    return _logistic_of_neg(log_w)


def phi_constant(params: LandscapeParams) -> float:
    """Upper-bound constant absorbing the drift and flatness-contrast rates."""
    p = params
    return (2 * (p.x1**2 - p.x2**2) / (27 * p.y_b)) * (p.L_d / p.y_d + 8 * p.x0**2 / (27 * p.y_f))


def freezing_point(params: LandscapeParams, delta_s: float, epsilon: float = DEFAULT_EPSILON) -> FreezingPoint:
    """y at which hopping out of the sharp valley stops keeping up with the drift.

    Out of regime cases: if delta_s <= (eps*phi)**2 the log is not positive and
    the valleys are frozen from the start (y_freeze = 0); if the denominator
    x2 - r is not positive the system never freezes (y_freeze = inf).
    """
    _check_noise(delta_s, strict=True)
    if not 0 < epsilon < 1:
        raise ValueError(f"0 < epsilon < 1 required (got {epsilon!r})")
    phi = phi_constant(params)
    if phi <= 0:
        return FreezingPoint(math.inf, phi, False)
    log_arg = math.log(delta_s) - 2 * math.log(epsilon * phi)
    if log_arg <= 0:
        return FreezingPoint(0.0, phi, False)
    r = math.sqrt(delta_s * log_arg)
    denom = params.x2 - r
    if denom <= 0:
        return FreezingPoint(math.inf, phi, False)
    return FreezingPoint(params.y_b * r / denom, phi, True)


def p_flat_transient(params: LandscapeParams, delta_s: float, epsilon: float = DEFAULT_EPSILON) -> Transient:
    """Flat-valley probability frozen in at y_freeze.

    ``p_flat_tr`` is the closed power-law form; ``p_flat_tr_chain`` plugs
    y_freeze into the exponential occupancy and agrees with it in regime.
    """
    fp = freezing_point(params, delta_s, epsilon)
    g = params.gamma
    if g == 1.0:
        # identical valleys: no selection, whatever the freezing point
        return Transient(0.5, 0.5, fp.y_freeze, fp.in_regime)
    log_base = 0.5 * math.log(delta_s) - math.log(epsilon * fp.phi)
    log_w = -0.5 * math.log(g) + (1.0 - g) * log_base
    p_tr = _logistic_of_neg(log_w)
    if math.isinf(fp.y_freeze):
        s2 = 1.0
    else:
        s2 = (fp.y_freeze / (params.y_b + fp.y_freeze)) ** 2
    log_w_chain = -0.5 * math.log(g) + (params.x2**2 - params.x1**2) / (2 * delta_s) * s2
    return Transient(p_tr, _logistic_of_neg(log_w_chain), fp.y_freeze, fp.in_regime)


@dataclass(frozen=True)
class TheoryPrediction:
    d11_flat: float
    d11_sharp: float
    t_eff: float
    tau_x: float
    tau_y: float
    log_mfpt_flat_to_sharp: float
    log_mfpt_sharp_to_flat: float
    log_k_flat: float
    log_k_sharp: float
    kramers_in_regime: bool
    p_flat_eq: float
    p_flat_ss: float
    y_freeze: float
    phi: float
    p_flat_tr: float
    freeze_in_regime: bool

    @property
    def mfpt_flat_to_sharp(self) -> float:
        return _exp(self.log_mfpt_flat_to_sharp)

    @property
    def mfpt_sharp_to_flat(self) -> float:
        return _exp(self.log_mfpt_sharp_to_flat)

    @property
    def k_flat(self) -> float:
        return _exp(self.log_k_flat)

    @property
    def k_sharp(self) -> float:
        return _exp(self.log_k_sharp)


def predict(params: LandscapeParams, delta_s: float, y: float,
            epsilon: float = DEFAULT_EPSILON) -> TheoryPrediction:
    """Bundle every closed-form quantity at one (delta_s, y)."""
    d = diffusion_and_temperature(params, delta_s, y)
    ts = timescales(params, y)
    m = kramers_mfpt(params, delta_s, y)
    ss = p_flat_steady(params, delta_s, y)
    tr = p_flat_transient(params, delta_s, epsilon)
    fp = freezing_point(params, delta_s, epsilon)
    return TheoryPrediction(
        d.d11_flat, d.d11_sharp, d.t_eff, ts.tau_x, ts.tau_y,
        m.log_flat_to_sharp, m.log_sharp_to_flat, m.log_k_flat, m.log_k_sharp,
        m.in_regime, ss.p_flat_eq, ss.p_flat_ss, fp.y_freeze, fp.phi,
        tr.p_flat_tr, fp.in_regime,
    )


__all__ = [
    "Diffusion", "Timescales", "Mfpt", "SteadyState", "FreezingPoint", "Transient",
    "TheoryPrediction", "diffusion_and_temperature", "drift_rate", "timescales",
    "timescale_ratio", "kramers_exponents", "kramers_regime", "kramers_mfpt",
    "asymptotic_log_rates", "p_flat_equilibrium", "p_flat_steady",
    "p_flat_steady_approx", "phi_constant", "freezing_point", "p_flat_transient",
    "predict", "drift_offset",
]


def log_escape_rates(params: LandscapeParams, delta_s: float, y):
    """Vectorized (log k+, log k-) over an array of y > 0."""
    import numpy as np

    y = np.asarray(y, dtype=float)
    if np.any(~(y > 0)):
        raise ValueError("escape rates need y > 0")
    geo = valley_geometry(params, y)
    dl = barrier_height(params, y)
    out = []
    for f in (geo.f1, geo.f2):
        a = np.sqrt(dl * f / (2 * delta_s))
        out.append(-(np.log(0.5 * np.pi * f) + specialfn.log_erfi_array(a)))
    return out[0], out[1]
