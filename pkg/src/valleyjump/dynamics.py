"""Discrete SGD-like Langevin dynamics with Hessian-shaped noise.

Each iteration applies theta <- theta - eta * (grad L + xi) with
xi ~ N(0, 2 sigma PSD(H)). The Gaussian is drawn as S @ z where S is the
principal square root of the clamped covariance and z are two standard
normals taken from the trajectory's own ``numpy.random.Generator``. Standard
normals are drawn in blocks; the stream is identical to drawing them one
step at a time, so ``step`` and ``simulate`` replay the same path.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Literal, NamedTuple

import numpy as np

from . import _kernels as K
from .landscape import LandscapeParams, hessian

log = logging.getLogger(__name__)

InitMode = Literal["flat_side", "sharp_side", "alternating"]
INIT_MODES = ("flat_side", "sharp_side", "alternating")
CHUNK = 16384


class DivergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class DynamicsConfig:
    eta: float = 0.01
    sigma: float = 0.1
    t_max: int = 200_000
    y0: float = 0.1
    init_mode: InitMode = "flat_side"
    x_init_offset: float = 0.05
    clamp_y: bool = False
    seed: int = 0
    record_stride: int = 100

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta > 0 required (got {self.eta!r})")
        if not self.sigma >= 0:
            raise ValueError(f"sigma >= 0 required (got {self.sigma!r})")
        if int(self.t_max) != self.t_max or self.t_max < 1:
            raise ValueError(f"t_max must be a positive integer (got {self.t_max!r})")
        if not self.y0 >= 0:
            raise ValueError(f"y0 >= 0 required (got {self.y0!r})")
        if self.init_mode not in INIT_MODES:
            raise ValueError(f"init_mode must be one of {INIT_MODES} (got {self.init_mode!r})")
        if not self.x_init_offset >= 0:
            raise ValueError(f"x_init_offset >= 0 required (got {self.x_init_offset!r})")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError(f"record_stride must be a positive integer (got {self.record_stride!r})")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def delta_s(self) -> float:
        return self.eta * self.sigma


class State(NamedTuple):
    x: float
    y: float

    @property
    def valley(self) -> str:
        return "flat" if self.x >= 0 else "sharp"


@dataclass(frozen=True)
class TrajectoryRecord:
    states: np.ndarray  # rows of (t, x, y, loss)
    switches: np.ndarray
    t_freeze: int
    final_valley: str
    final_state: State
    diverged: bool = False
    n_switches: int = field(default=-1)

    def __post_init__(self):
        if self.n_switches < 0:
            object.__setattr__(self, "n_switches", len(self.switches))


def noise_covariance(params: LandscapeParams, x: float, y: float, sigma: float) -> np.ndarray:
    """2 sigma times the Hessian with negative eigenvalues clamped to zero."""
    if sigma < 0:
        raise ValueError("sigma >= 0 required")
    h = hessian(params, x, y)
    w, v = np.linalg.eigh(h)
    return 2.0 * sigma * (v * np.clip(w, 0.0, None)) @ v.T


def noise_sqrt(params: LandscapeParams, x: float, y: float, sigma: float) -> np.ndarray:
    """Principal square root of ``noise_covariance``, as used by the integrator."""
    h = hessian(params, x, y)
    a, b, c = K.psd_sqrt(2 * sigma * h[0, 0], 2 * sigma * h[0, 1], 2 * sigma * h[1, 1])
    return np.array([[a, b], [b, c]])


def initial_state(config: DynamicsConfig, run_index: int = 0) -> State:
    mode = config.init_mode
    if mode == "alternating":
        mode = "flat_side" if run_index % 2 == 0 else "sharp_side"
    sign = 1.0 if mode == "flat_side" else -1.0
    return State(sign * config.x_init_offset, config.y0)


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _diverge_x(params: LandscapeParams) -> float:
    return 100.0 * params.x1


_EMPTY_REC = np.zeros((0, 4))
_EMPTY_SW = np.zeros(0, dtype=np.int64)


def step(params: LandscapeParams, config: DynamicsConfig, state: State,
         rng: np.random.Generator) -> State:
    """One update. Draws two normals from ``rng`` only when sigma > 0."""
    if state.y < 0:
        raise ValueError("state must have y >= 0")
    z = rng.standard_normal((1, 2)) if config.sigma > 0 else np.zeros((1, 2))
    x, y, *_, diverged = K.integrate(
        params.packed, config.eta, config.sigma, config.clamp_y, _diverge_x(params),
        float(state.x), float(state.y), 0, z, 0, _EMPTY_REC, 0, _EMPTY_SW, 0, 0)
    if diverged:
        raise DivergenceError(f"non-finite or runaway iterate at ({x}, {y})")
    return State(x, y)


def run_kernel(params: LandscapeParams, config: DynamicsConfig, state: State,
               rng: np.random.Generator, record: bool):
    """Stream the compiled integrator over ``config.t_max`` steps.

    Returns (final State, t_reached, states, switches, n_switches, last_switch, diverged).
    """
    p = params.packed
    x, y = float(state.x), float(state.y)
    t = 0
    n_sw_total = 0
    last_sw = 0
    stride = config.record_stride if record else 0
    rec_parts = []
    sw_parts = []
    if record:
        rec_parts.append(np.array([[0.0, x, y, K.loss(p, x, y)]]))
    diverged = False
    remaining = int(config.t_max)
    zeros = None
    while remaining > 0 and not diverged:
        n = min(CHUNK, remaining)
        if config.sigma > 0:
            z = rng.standard_normal((n, 2))
        else:
            if zeros is None or zeros.shape[0] != n:
                zeros = np.zeros((n, 2))
            z = zeros
        if record:
            rec = np.empty((n // stride + 1, 4))
            sw = np.empty(n, dtype=np.int64)
        else:
            rec, sw = _EMPTY_REC, _EMPTY_SW
        x, y, t, n_rec, n_sw, last_sw, diverged = K.integrate(
            p, config.eta, config.sigma, config.clamp_y, _diverge_x(params),
            x, y, t, z, stride, rec, 0, sw, 0, last_sw)
        n_sw_total += n_sw
        if record:
            rec_parts.append(rec[:n_rec])
            sw_parts.append(sw[:n_sw])
        remaining -= n
    states = np.concatenate(rec_parts) if record else _EMPTY_REC
    switches = np.concatenate(sw_parts) if record and sw_parts else _EMPTY_SW.copy()
    return State(x, y), t, states, switches, n_sw_total, last_sw, diverged


def simulate(params: LandscapeParams, config: DynamicsConfig, run_index: int = 0,
             rng: np.random.Generator | None = None) -> TrajectoryRecord:
    """Run ``t_max`` steps from the configured start and record the path.

    A diverged run stops at the offending iterate and is flagged rather than
    raised, so ensembles can exclude it.
    """
    if rng is None:
        rng = make_rng(config.seed)
    start = initial_state(config, run_index)
    final, _, states, switches, n_sw, last_sw, diverged = run_kernel(
        params, config, start, rng, record=True)
    if diverged:
        log.debug("trajectory diverged at %s", final)
    valley = "flat" if final.x >= 0 else "sharp"
    return TrajectoryRecord(states, switches, int(last_sw), valley, final, bool(diverged), int(n_sw))


def with_overrides(config: DynamicsConfig, **kw) -> DynamicsConfig:
    return replace(config, **kw)
