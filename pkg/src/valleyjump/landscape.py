"""Two-valley bifurcating loss surface.

The surface is piecewise quadratic in ``x`` with a flatter branch on
``x >= 0`` and a sharper one on ``x < 0``. Both minima sit at the same depth
below the ridge ``x = 0``; the depth grows with ``y`` and saturates at
``x0**2 / f0``. At ``x = 0`` all derivatives use the ``x >= 0`` branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np

from . import _kernels as K

Branch = Literal["flat", "sharp"]


class DomainError(ValueError):
    """Raised when a landscape quantity is requested for y < 0."""


@dataclass(frozen=True)
class LandscapeParams:
    x1: float = 0.8
    x2: float = 0.4
    x0: float = 1.0
    f0: float = 1.0
    y_b: float = 2.5
    y_f: float = 2.5
    L_d: float = 0.05
    y_d: float = 1.0
    l0_star: float = field(init=False)
    gamma: float = field(init=False)

    def __post_init__(self):
        for name in ("x1", "x2", "x0", "f0", "y_b", "y_f", "y_d"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} > 0 required (got {v!r})")
        if not (math.isfinite(self.L_d) and self.L_d >= 0):
            raise ValueError(f"L_d >= 0 required (got {self.L_d!r})")
        if not self.x1 >= self.x2:
            raise ValueError("x1 > x2 required")
        object.__setattr__(self, "l0_star", self.x0**2 / self.f0)
        object.__setattr__(self, "gamma", (self.x1 / self.x2) ** 2)

    @property
    def packed(self) -> np.ndarray:
        return K.pack(self)

    def replace(self, **changes) -> "LandscapeParams":
        kw = {k: getattr(self, k) for k in K.PARAM_ORDER}
        kw.update(changes)
        return LandscapeParams(**kw)


class ValleyGeometry(NamedTuple):
    g1: float
    g2: float
    f1: float
    f2: float
    x1_star: float
    x2_star: float


def _check_y(y):
    if np.any(np.asarray(y) < 0):
        raise DomainError(f"landscape is defined for y >= 0 (got y={y!r})")


def valley_geometry(params: LandscapeParams, y: float) -> ValleyGeometry:
    """Valley offsets ``g``, flatness ``f`` and minimum positions at ``y``."""
    _check_y(y)
    s = y / (y + params.y_b)
    shape = ((y + params.y_f) / (y + params.y_b)) ** 2
    g1 = 2.0 * params.x1 * s
    g2 = 2.0 * params.x2 * s
    f1 = params.f0 * (params.x1 / params.x0) ** 2 * shape
    f2 = params.f0 * (params.x2 / params.x0) ** 2 * shape
    return ValleyGeometry(g1, g2, f1, f2, 0.5 * g1, -0.5 * g2)


def drift_offset(params: LandscapeParams, y):
    """L0(y): the ridge height, a decaying bias plus the constant offset."""
    _check_y(y)
    return params.L_d * np.exp(-np.asarray(y, dtype=float) / params.y_d) + params.l0_star


def loss(params: LandscapeParams, x, y):
    """Loss at (x, y); ``x`` may be an array, ``y`` a scalar or array."""
    _check_y(y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    geo = valley_geometry(params, y)
    flat = x * (x - geo.g1) / geo.f1
    sharp = x * (x + geo.g2) / geo.f2
    out = drift_offset(params, y) + np.where(x >= 0, flat, sharp)
    return float(out) if out.ndim == 0 else out


def gradient(params: LandscapeParams, x: float, y: float) -> np.ndarray:
    _check_y(y)
    return np.array(K.gradient(params.packed, float(x), float(y)))


def hessian(params: LandscapeParams, x: float, y: float) -> np.ndarray:
    """Symmetric 2x2 Hessian; H11 jumps from 2/f2 to 2/f1 across x = 0."""
    _check_y(y)
    hxx, hxy, hyy = K.hessian(params.packed, float(x), float(y))
    return np.array([[hxx, hxy], [hxy, hyy]])


def barrier_height(params: LandscapeParams, y):
    """Ridge height above either valley floor; increases toward x0**2/f0."""
    _check_y(y)
    y = np.asarray(y, dtype=float)
    out = params.l0_star * y**2 / (y + params.y_f) ** 2
    return float(out) if out.ndim == 0 else out


def effective_loss(params: LandscapeParams, x, y, branch: Branch | None = None):
    """Noise-reshaped potential whose Boltzmann weight at T_eff gives the NESS.

    ``branch`` picks the flatness exponent (+1/2 for flat, -1/2 for sharp);
    by default it follows the sign of ``x``.
    """
    _check_y(y)
    x = np.asarray(x, dtype=float)
    base = loss(params, x, y)
    l0 = drift_offset(params, y)
    root = math.sqrt(params.gamma)
    if branch is None:
        w = np.where(x >= 0, root, 1.0 / root)
    elif branch == "flat":
        w = root
    elif branch == "sharp":
        w = 1.0 / root
    else:
        raise ValueError(f"unknown branch {branch!r}")
    out = w * base + (1.0 - w) * l0
    return float(out) if np.ndim(out) == 0 else out


def sgd_correction(params: LandscapeParams, x, y, branch: Branch | None = None):
    """L_eff - L: negative inside the flat valley, positive inside the sharp one."""
    return effective_loss(params, x, y, branch) - loss(params, x, y)
