import math

import numpy as np
import pytest

from valleyjump import DynamicsConfig, LandscapeParams, SweepGrid, run_ensemble, sweep
from valleyjump.experiments import clamped_ensemble, run_seed, worker_count

SMALL = SweepGrid(eta_values=(0.01, 0.05), sigma_values=(0.1, 1.0), runs_per_cell=6, base_seed=5)
SHORT = DynamicsConfig(t_max=4000)


def test_grid_validation():
    with pytest.raises(ValueError):
        SweepGrid(runs_per_cell=3)
    with pytest.raises(ValueError):
        SweepGrid(eta_values=())
    assert SweepGrid(eta_values=(0.1, 0.01)).eta_values == (0.01, 0.1)


def test_seeds_distinct_per_cell_and_run():
    states = {tuple(run_seed(0, i, j, r).generate_state(2)) for i in range(3) for j in range(3) for r in range(4)}
    assert len(states) == 36
    assert run_seed(0, 1, 2, 3).entropy == run_seed(0, 1, 2, 3).entropy


def test_ensemble_statistics(params):
    st = run_ensemble(params, DynamicsConfig(sigma=0.3, t_max=4000), 20, base_seed=1)
    assert st.n_total == 20 and st.n_diverged == 0
    assert st.p_flat == pytest.approx(st.final_flat.mean())
    assert st.p_flat_se == pytest.approx(math.sqrt(st.p_flat * (1 - st.p_flat) / 20))
    assert st.mean_t_freeze_norm == pytest.approx(0.01 * st.t_freeze.mean())


def test_ensemble_uses_both_starts(params):
    # zero noise: each run keeps the valley it starts in
    st = run_ensemble(params, DynamicsConfig(sigma=0.0, t_max=200), 10, base_seed=0)
    np.testing.assert_array_equal(st.final_flat, [True, False] * 5)
    assert st.p_flat == 0.5


def test_divergent_cell_warns(params):
    cfg = DynamicsConfig(eta=5.0, sigma=0.0, t_max=500, y0=3.0, x_init_offset=0.3)
    with pytest.warns(RuntimeWarning):
        st = run_ensemble(params, cfg, 4, base_seed=0)
    assert st.divergent and math.isnan(st.p_flat)


def test_sweep_independent_of_thread_count(params):
    a = sweep(params, SMALL, SHORT, threads=1)
    b = sweep(params, SMALL, SHORT, threads=3)
    assert [(c.eta_index, c.sigma_index) for c in a] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    for ca, cb in zip(a, b):
        assert ca.stats == cb.stats
        np.testing.assert_array_equal(ca.stats.t_freeze, cb.stats.t_freeze)


def test_sweep_cell_matches_direct_ensemble(params):
    cells = sweep(params, SMALL, SHORT, threads=1)
    direct = run_ensemble(params, DynamicsConfig(eta=0.05, sigma=0.1, t_max=4000), 6, 5, (1, 0))
    np.testing.assert_array_equal(cells[2].stats.t_freeze, direct.t_freeze)
    assert cells[2].delta_s == pytest.approx(0.005)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("VALLEYJUMP_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("VALLEYJUMP_THREADS", "0")
    with pytest.raises(ValueError):
        worker_count()


def test_clamped_ensemble_samples(params):
    st, xs = clamped_ensemble(params, 1.0, 0.01, 0.5, 4, 2000, base_seed=0, stride=10)
    assert st.n_total == 4
    assert xs.size == 4 * 160
    assert np.all(st.t_freeze >= 0)


def test_symmetric_landscape_no_preference():
    p = LandscapeParams(x1=0.6, x2=0.6)
    st = run_ensemble(p, DynamicsConfig(eta=0.05, sigma=0.5, t_max=20_000), 60, base_seed=2)
    assert abs(st.p_flat - 0.5) <= 3 * st.p_flat_se


def test_one_by_one_grid_is_an_ensemble(params):
    grid = SweepGrid(eta_values=(0.02,), sigma_values=(0.3,), runs_per_cell=8, base_seed=9)
    (cell,) = sweep(params, grid, SHORT, threads=1)
    direct = run_ensemble(params, DynamicsConfig(eta=0.02, sigma=0.3, t_max=4000), 8, 9)
    assert cell.stats == direct


def test_equal_noise_cells_compatible():
    """Along anti-diagonals of the default grid only eta*sigma matters (small eta)."""
    from valleyjump.acceptance import default_sweep

    cells = {(c.eta_index, c.sigma_index): c for c in default_sweep()}
    etas = SweepGrid().eta_values
    checked = 0
    for (i, j), a in cells.items():
        for (k, m), b in cells.items():
            if k <= i or i + j != k + m or etas[k] > 0.01:
                continue
            slack = 3 * math.hypot(a.stats.p_flat_se, b.stats.p_flat_se)
            assert abs(a.stats.p_flat - b.stats.p_flat) <= max(slack, 1e-12), (a, b)
            checked += 1
    assert checked > 10
