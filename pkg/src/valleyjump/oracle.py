"""Brute-force numerical references for the closed-form theory.

These avoid the closed forms they check: first-passage times come from the
nested double integral over the actual loss, the conditional density from
direct quadrature of the Boltzmann weights, and valley occupancy in time
from integrating the two-state master equation step by step.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from numba import njit
from scipy import integrate, optimize

from . import theory
from .landscape import LandscapeParams, drift_offset, loss, valley_geometry

Direction = Literal["sharp_to_flat", "flat_to_sharp"]

# Boltzmann exponent drop at the truncation bounds (~1e-17 relative mass).
TAIL_LOG = 40.0


class QuadratureError(RuntimeError):
    pass


class StabilityError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    x_min: float | None = None  # None: place the bound TAIL_LOG units below the peak
    x_max: float | None = None
    abs_tol: float = 0.0
    rel_tol: float = 1e-10
    max_refinements: int = 200


def _quad(fn, a, b, spec: QuadratureSpec, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(
            fn, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
            limit=spec.max_refinements, points=points, full_output=1)[:3]
    if not math.isfinite(val) or err > max(spec.abs_tol, 10 * spec.rel_tol * abs(val)):
        raise QuadratureError(f"quadrature stalled on [{a}, {b}]: value {val}, error {err}")
    return val


def _branch_minimum(params: LandscapeParams, y: float, flat: bool) -> tuple[float, float]:
    """Locate a valley floor numerically rather than from the geometry formulas."""
    span = 2.0 * (params.x1 if flat else params.x2)
    lo, hi = (0.0, span) if flat else (-span, 0.0)
    res = optimize.minimize_scalar(lambda x: loss(params, x, y), bounds=(lo, hi),
                                   method="bounded", options={"xatol": 1e-13})
    return float(res.x), float(res.fun)


def log_mfpt_quadrature(params: LandscapeParams, delta_s: float, y: float,
                        direction: Direction, spec: QuadratureSpec | None = None) -> float:
    """ln of the mean first-passage time from a valley floor to the ridge x = 0.

    tau = (1/D) int_{x*}^{0} dx' e^{L(x')/D} int_{-inf}^{x'} dx'' e^{-L(x'')/D}
    for the sharp valley (mirrored for the flat one), with D the valley's
    transverse diffusion coefficient. Both exponentials are shifted by their
    peaks so the integrands stay O(1).
    """
    if not (y > 0 and delta_s > 0):
        raise ValueError("mfpt_quadrature needs y > 0 and delta_s > 0")
    spec = spec or QuadratureSpec()
    flat = direction == "flat_to_sharp"
    if direction not in ("flat_to_sharp", "sharp_to_flat"):
        raise ValueError(f"unknown direction {direction!r}")
    geo = valley_geometry(params, y)
    f = geo.f1 if flat else geo.f2
    d = 2.0 * delta_s / f
    x_star, l_min = _branch_minimum(params, y, flat)
    l_top = float(loss(params, 0.0, y))
    width = math.sqrt(TAIL_LOG * f * d)

    def well(xx):
        return math.exp(-(loss(params, xx, y) - l_min) / d)

    if flat:
        x_far = spec.x_max if spec.x_max is not None else x_star + width

        def inner(xp):
            return _quad(well, xp, x_far, spec, points=[x_star] if xp < x_star < x_far else None)

        a, b = 0.0, x_star
    else:
        x_far = spec.x_min if spec.x_min is not None else x_star - width

        def inner(xp):
            return _quad(well, x_far, xp, spec, points=[x_star] if x_far < x_star < xp else None)

        a, b = x_star, 0.0

    def outer(xp):
        return math.exp((loss(params, xp, y) - l_top) / d) * inner(xp)

    total = _quad(outer, a, b, spec)
    return -math.log(d) + (l_top - l_min) / d + math.log(total)


def mfpt_quadrature(params: LandscapeParams, delta_s: float, y: float,
                    direction: Direction, spec: QuadratureSpec | None = None) -> float:
    v = log_mfpt_quadrature(params, delta_s, y, direction, spec)
    return math.exp(v) if v < 709 else math.inf


@dataclass(frozen=True)
class BoltzmannConditional:
    """Quasi-steady density of x at fixed y, glued by continuity at x = 0.

    The weight on each side is exp(-(L - L0)/D11), with the flatter side's
    D11 on x >= 0. ``branch`` restricts the density to one valley and
    renormalizes it there.
    """

    params: LandscapeParams
    y: float
    d_flat: float
    d_sharp: float
    log_mass_flat: float   # ln int_{x>=0} exp(-(L - L0)/D+)
    log_mass_sharp: float
    branch: str = "both"

    @property
    def log_z(self) -> float:
        if self.branch == "flat":
            return self.log_mass_flat
        if self.branch == "sharp":
            return self.log_mass_sharp
        return float(np.logaddexp(self.log_mass_flat, self.log_mass_sharp))

    @property
    def z(self) -> float:
        return math.exp(self.log_z)

    @property
    def p_flat(self) -> float:
        return 1.0 / (1.0 + math.exp(self.log_mass_sharp - self.log_mass_flat))

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        l0 = float(drift_offset(self.params, self.y))
        excess = np.asarray(loss(self.params, x, self.y)) - l0
        out = np.where(x >= 0, -excess / self.d_flat, -excess / self.d_sharp) - self.log_z
        if self.branch == "flat":
            out = np.where(x >= 0, out, -np.inf)
        elif self.branch == "sharp":
            out = np.where(x < 0, out, -np.inf)
        return out

    def pdf(self, x):
        return np.exp(self.log_pdf(x))

    def support(self) -> tuple[float, float]:
        geo = valley_geometry(self.params, self.y)
        lo = geo.x2_star - math.sqrt(TAIL_LOG * geo.f2 * self.d_sharp)
        hi = geo.x1_star + math.sqrt(TAIL_LOG * geo.f1 * self.d_flat)
        return lo, hi

    def cdf_table(self, n: int = 40001) -> tuple[np.ndarray, np.ndarray]:
        """CDF on a dense grid spanning the support (Simpson-accumulated)."""
        lo, hi = self.support()
        xs = np.union1d(np.linspace(lo, hi, n), [0.0])
        pdf = self.pdf(xs)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(xs))])
        return xs, cdf / cdf[-1]

    def cdf(self, x):
        xs, c = self.cdf_table()
        return np.interp(x, xs, c)


def boltzmann_conditional(params: LandscapeParams, delta_s: float, y: float,
                          branch: str = "both",
                          spec: QuadratureSpec | None = None) -> BoltzmannConditional:
    if not (y > 0 and delta_s > 0):
        raise ValueError("boltzmann_conditional needs y > 0 and delta_s > 0")
    if branch not in ("both", "flat", "sharp"):
        raise ValueError(f"unknown branch {branch!r}")
    spec = spec or QuadratureSpec(rel_tol=1e-12)
    geo = valley_geometry(params, y)
    d_flat = 2.0 * delta_s / geo.f1
    d_sharp = 2.0 * delta_s / geo.f2
    l0 = float(drift_offset(params, y))
    masses = []
    for flat, d, f in ((True, d_flat, geo.f1), (False, d_sharp, geo.f2)):
        x_star, l_min = _branch_minimum(params, y, flat)
        peak = -(l_min - l0) / d
        width = math.sqrt(TAIL_LOG * f * d)
        a, b = (0.0, x_star + width) if flat else (x_star - width, 0.0)

        def w(xx, d=d, peak=peak):
            return math.exp(-(loss(params, xx, y) - l0) / d - peak)

        masses.append(peak + math.log(_quad(w, a, b, spec, points=[x_star])))
    return BoltzmannConditional(params, y, d_flat, d_sharp, masses[0], masses[1], branch)


@njit(cache=True)
def _relax(p0, k_flat, k_sharp, dt):
    out = np.empty(k_flat.shape[0] + 1)
    out[0] = p0
    p = p0
    for i in range(k_flat.shape[0]):
        p = p + dt * (k_sharp[i] * (1.0 - p) - k_flat[i] * p)
        out[i + 1] = p
    return out


@dataclass(frozen=True)
class MasterEquationResult:
    t: np.ndarray
    y: np.ndarray
    p_flat: np.ndarray

    @property
    def terminal(self) -> float:
        return float(self.p_flat[-1])


def master_equation_pflat(params: LandscapeParams, delta_s: float, p0_flat: float,
                          y_path: Callable[[np.ndarray], np.ndarray] | float,
                          t_end: float, dt: float) -> MasterEquationResult:
    """Explicit-Euler integration of dP/dt = k-(1 - P) - k+ P along y(t).

    Rates come from the closed-form escape times at y(t). The step must keep
    dt * (k+ + k-) < 0.1 everywhere on the path.
    """
    if not 0 <= p0_flat <= 1:
        raise ValueError("p0_flat must lie in [0, 1]")
    if not (dt > 0 and t_end > 0):
        raise ValueError("dt and t_end must be positive")
    n = int(round(t_end / dt))
    t = np.arange(n + 1) * dt
    if callable(y_path):
        y = np.asarray(y_path(t), dtype=float)
    else:
        y = np.full(n + 1, float(y_path))
    log_kf, log_ks = theory.log_escape_rates(params, delta_s, y[:-1])
    kf = np.exp(log_kf)
    ks = np.exp(log_ks)
    worst = float(np.max(dt * (kf + ks)))
    if worst >= 0.1:
        raise StabilityError(f"dt * (k+ + k-) reaches {worst:.3g}; reduce dt below {0.1 * dt / worst:.3g}")
    return MasterEquationResult(t, y, _relax(float(p0_flat), kf, ks, dt))


def slow_y_path(params: LandscapeParams, y0: float, t_end: float) -> Callable[[np.ndarray], np.ndarray]:
    """Noiseless drift of y along a valley floor, dy/dt = -d/dy [L0(y) - barrier(y)]."""
    sol = integrate.solve_ivp(lambda _t, yy: [theory.drift_rate(params, max(yy[0], 0.0))],
                              (0.0, t_end), [y0], method="DOP853", rtol=1e-10, atol=1e-12,
                              dense_output=True)
    if not sol.success:
        raise RuntimeError(sol.message)
    return lambda t: sol.sol(np.asarray(t, dtype=float))[0]
