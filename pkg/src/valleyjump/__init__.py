"""Two-valley loss landscape: SGD/Langevin dynamics, escape-rate theory and oracles."""

from .landscape import DomainError, LandscapeParams, barrier_height, gradient, hessian, loss
from .dynamics import DynamicsConfig, simulate
from .experiments import SweepGrid, run_ensemble, sweep
from .specialfn import erfi, log_erfi
from .theory import kramers_mfpt, p_flat_steady, p_flat_transient, freezing_point, predict

__version__ = "0.1.0"

__all__ = [
    "DomainError", "LandscapeParams", "barrier_height", "gradient", "hessian", "loss",
    "DynamicsConfig", "simulate", "SweepGrid", "run_ensemble", "sweep",
    "erfi", "log_erfi", "kramers_mfpt", "p_flat_steady", "p_flat_transient",
    "freezing_point", "predict",
]
