"""Monte Carlo ensembles and (eta, sigma) sweeps.

Every run owns a PCG64 stream seeded from (base_seed, eta index, sigma
index, run index) through ``numpy.random.SeedSequence``, so cells and runs
can be evaluated in any order, on any number of workers, with identical
results.
"""

from __future__ import annotations

import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import theory
from .dynamics import DynamicsConfig, initial_state, run_kernel
from .landscape import LandscapeParams

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepGrid:
    eta_values: tuple[float, ...] = tuple(np.logspace(-3, -1, 7).tolist())
    sigma_values: tuple[float, ...] = tuple(np.logspace(-2, 0, 7).tolist())
    runs_per_cell: int = 200
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "eta_values", tuple(sorted(float(v) for v in self.eta_values)))
        object.__setattr__(self, "sigma_values", tuple(sorted(float(v) for v in self.sigma_values)))
        if not self.eta_values or not self.sigma_values:
            raise ValueError("grid needs at least one eta and one sigma")
        if self.runs_per_cell < 2 or self.runs_per_cell % 2:
            raise ValueError("runs_per_cell must be a positive even number")


@dataclass(frozen=True)
class EnsembleStats:
    n_total: int
    n_diverged: int
    p_flat: float
    p_flat_se: float
    mean_t_freeze: float
    mean_t_freeze_norm: float
    switch_count_mean: float
    mean_final_y: float
    # per-run outcomes in run-index order; diverged runs carry t_freeze = -1
    t_freeze: np.ndarray = field(repr=False, compare=False)
    final_flat: np.ndarray = field(repr=False, compare=False)
    diverged: np.ndarray = field(repr=False, compare=False)

    @property
    def n_valid(self) -> int:
        return self.n_total - self.n_diverged

    @property
    def divergent(self) -> bool:
        return self.n_diverged > 0.5 * self.n_total


def run_seed(base_seed: int, eta_index: int, sigma_index: int, run_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(base_seed), int(eta_index), int(sigma_index), int(run_index)])


def _one_run(params, config, run_index, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    start = initial_state(config, run_index)
    final, _, _, _, n_sw, last_sw, diverged = run_kernel(params, config, start, rng, record=False)
    return final, n_sw, last_sw, diverged


def run_ensemble(params: LandscapeParams, config: DynamicsConfig, n_runs: int,
                 base_seed: int, cell: tuple[int, int] = (0, 0)) -> EnsembleStats:
    """Run ``n_runs`` trajectories, alternating flat/sharp starts, and aggregate.

    Diverged runs are excluded from every statistic except the counts.
    """
    if n_runs < 2 or n_runs % 2:
        raise ValueError("n_runs must be a positive even number")
    config = replace(config, init_mode="alternating")
    t_freeze = np.full(n_runs, -1, dtype=np.int64)
    final_flat = np.zeros(n_runs, dtype=bool)
    diverged = np.zeros(n_runs, dtype=bool)
    n_switch = np.zeros(n_runs, dtype=np.int64)
    final_y = np.zeros(n_runs)
    for r in range(n_runs):
        final, n_sw, last_sw, div = _one_run(params, config, r, run_seed(base_seed, *cell, r))
        diverged[r] = div
        if not div:
            t_freeze[r] = last_sw
            final_flat[r] = final.x >= 0
            n_switch[r] = n_sw
            final_y[r] = final.y
    return _aggregate(config.eta, t_freeze, final_flat, diverged, n_switch, final_y)


def _aggregate(eta, t_freeze, final_flat, diverged, n_switch, final_y) -> EnsembleStats:
    n_total = len(diverged)
    ok = ~diverged
    n = int(ok.sum())
    if n_total - n > 0.5 * n_total:
        warnings.warn(f"{n_total - n}/{n_total} runs diverged; cell reported as divergent",
                      RuntimeWarning, stacklevel=3)
    if n == 0:
        nan = math.nan
        return EnsembleStats(n_total, n_total, nan, nan, nan, nan, nan, nan,
                             t_freeze, final_flat, diverged)
    p = float(final_flat[ok].mean())
    mean_tf = float(t_freeze[ok].mean())
    return EnsembleStats(
        n_total=n_total, n_diverged=n_total - n, p_flat=p,
        p_flat_se=math.sqrt(p * (1 - p) / n), mean_t_freeze=mean_tf,
        mean_t_freeze_norm=eta * mean_tf, switch_count_mean=float(n_switch[ok].mean()),
        mean_final_y=float(final_y[ok].mean()),
        t_freeze=t_freeze, final_flat=final_flat, diverged=diverged)


@dataclass(frozen=True)
class SweepCell:
    eta_index: int
    sigma_index: int
    eta: float
    sigma: float
    stats: EnsembleStats
    p_flat_ss_theory: float  # at the ensemble's mean final y
    p_flat_tr_theory: float
    freeze_in_regime: bool

    @property
    def delta_s(self) -> float:
        return self.eta * self.sigma


def worker_count() -> int:
    raw = os.environ.get("VALLEYJUMP_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    n = int(raw)
    if n < 1:
        raise ValueError("VALLEYJUMP_THREADS must be a positive integer")
    return n


def _theory_for(params, delta_s, y_eval, epsilon):
    if not (delta_s > 0) or not (y_eval > 0) or not math.isfinite(y_eval):
        return math.nan, math.nan, False
    ss = theory.p_flat_steady(params, delta_s, y_eval).p_flat_ss
    tr = theory.p_flat_transient(params, delta_s, epsilon)
    return ss, tr.p_flat_tr, tr.in_regime


def sweep(params: LandscapeParams, grid: SweepGrid, dynamics_defaults: DynamicsConfig,
          epsilon: float = theory.DEFAULT_EPSILON, threads: int | None = None,
          progress=None) -> list[SweepCell]:
    """One ensemble per (eta, sigma) cell plus the matching closed-form values.

    Cells come back in row-major (eta, sigma) order whatever the scheduling.
    """
    jobs = [(i, j, e, s) for i, e in enumerate(grid.eta_values)
            for j, s in enumerate(grid.sigma_values)]

    def work(job):
        i, j, e, s = job
        cfg = replace(dynamics_defaults, eta=e, sigma=s)
        stats = run_ensemble(params, cfg, grid.runs_per_cell, grid.base_seed, (i, j))
        ss, tr, regime = _theory_for(params, e * s, stats.mean_final_y, epsilon)
        if progress is not None:
            progress(i, j)
        return SweepCell(i, j, e, s, stats, ss, tr, regime)

    n_workers = threads or worker_count()
    if n_workers == 1:
        cells = [work(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            cells = list(pool.map(work, jobs))
    return sorted(cells, key=lambda c: (c.eta_index, c.sigma_index))


def clamped_ensemble(params: LandscapeParams, y: float, eta: float, sigma: float,
                     n_runs: int, t_max: int, base_seed: int, stride: int = 16,
                     burn_in: float = 0.2) -> tuple[EnsembleStats, np.ndarray]:
    """Ensemble at frozen y, returning stats and pooled post-burn-in x samples."""
    from .dynamics import simulate

    cfg = DynamicsConfig(eta=eta, sigma=sigma, t_max=t_max, y0=y, init_mode="alternating",
                         clamp_y=True, record_stride=stride)
    n = n_runs
    t_freeze = np.full(n, -1, dtype=np.int64)
    final_flat = np.zeros(n, dtype=bool)
    diverged = np.zeros(n, dtype=bool)
    n_switch = np.zeros(n, dtype=np.int64)
    final_y = np.zeros(n)
    samples = []
    for r in range(n):
        rng = np.random.Generator(np.random.PCG64(run_seed(base_seed, 0, 0, r)))
        rec = simulate(params, cfg, run_index=r, rng=rng)
        diverged[r] = rec.diverged
        if rec.diverged:
            continue
        t_freeze[r] = rec.t_freeze
        final_flat[r] = rec.final_valley == "flat"
        n_switch[r] = rec.n_switches
        final_y[r] = rec.final_state.y
        keep = rec.states[:, 0] > burn_in * t_max
        samples.append(rec.states[keep, 1])
    stats = _aggregate(eta, t_freeze, final_flat, diverged, n_switch, final_y)
    return stats, np.concatenate(samples) if samples else np.zeros(0)
