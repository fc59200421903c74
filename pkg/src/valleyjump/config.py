"""Flat ``section.key = value`` run configuration.

Lines are ``key = value`` with ``#`` comments; unknown or repeated keys are
errors. Every default that fills a missing key is logged at INFO level so a
run's effective settings can be reconstructed from its log.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .dynamics import INIT_MODES, DynamicsConfig
from .experiments import SweepGrid
from .landscape import LandscapeParams
from .theory import DEFAULT_EPSILON

log = logging.getLogger(__name__)

FORMATS = ("csv", "svg")


class ConfigError(ValueError):
    """Bad configuration text or a violated parameter invariant."""


@dataclass(frozen=True)
class RunConfig:
    landscape: LandscapeParams = field(default_factory=LandscapeParams)
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    grid: SweepGrid = field(default_factory=SweepGrid)
    epsilon: float = DEFAULT_EPSILON
    output_dir: str = "out"
    formats: tuple[str, ...] = FORMATS


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_int(text: str) -> int:
    v = float(text) if any(c in text for c in ".eE") else int(text)
    if int(v) != v:
        raise ValueError(f"expected an integer, got {text!r}")
    return int(v)


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


# section -> key -> parser
_SCHEMA = {
    "landscape": {k: float for k in ("x1", "x2", "x0", "f0", "y_b", "y_f", "L_d", "y_d")},
    "dynamics": {
        "eta": float, "sigma": float, "t_max": _parse_int, "y0": float,
        "init_mode": str, "x_init_offset": float, "clamp_y": _parse_bool,
        "seed": _parse_int, "record_stride": _parse_int,
    },
    "grid": {
        "eta_values": _float_list, "sigma_values": _float_list,
        "runs_per_cell": _parse_int, "base_seed": _parse_int,
    },
    "run": {
        "epsilon": float, "output_dir": str,
        "formats": lambda s: tuple(v.strip() for v in s.split(",") if v.strip()),
    },
}


def known_keys() -> list[str]:
    return [f"{s}.{k}" for s, keys in _SCHEMA.items() for k in keys]


def parse_config(text: str) -> RunConfig:
    values: dict[str, dict[str, object]] = {s: {} for s in _SCHEMA}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, _, value = (part.strip() for part in line.partition("="))
        section, dot, name = key.partition(".")
        if not dot or section not in _SCHEMA or name not in _SCHEMA[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if name in values[section]:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[section][name] = _SCHEMA[section][name](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return _build(values)


def _build(values) -> RunConfig:
    defaults = RunConfig()
    for section, keys in _SCHEMA.items():
        for name in keys:
            if name not in values[section]:
                log.info("default applied: %s.%s = %s", section, name,
                         _format(_default_of(defaults, section, name)))
    try:
        landscape = dataclasses.replace(defaults.landscape, **values["landscape"])
        dyn = dict(values["dynamics"])
        if "init_mode" in dyn and dyn["init_mode"] not in INIT_MODES:
            raise ValueError(f"dynamics.init_mode must be one of {INIT_MODES}")
        dynamics = dataclasses.replace(defaults.dynamics, **dyn)
        grid = dataclasses.replace(defaults.grid, **values["grid"])
        run = values["run"]
        formats = run.get("formats", defaults.formats)
        bad = [f for f in formats if f not in FORMATS]
        if bad:
            raise ValueError(f"run.formats entries must be among {FORMATS} (got {bad})")
        epsilon = run.get("epsilon", defaults.epsilon)
        if not 0 < epsilon < 1:
            raise ValueError("run.epsilon must lie in (0, 1)")
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(landscape, dynamics, grid, epsilon,
                     run.get("output_dir", defaults.output_dir), tuple(formats))


def _default_of(cfg: RunConfig, section: str, name: str):
    if section == "run":
        return getattr(cfg, name)
    return getattr(getattr(cfg, section), name)


def _format(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(_format(x) for x in v)
    return str(v)


def serialize(cfg: RunConfig) -> str:
    lines = []
    for section, keys in _SCHEMA.items():
        for name in keys:
            lines.append(f"{section}.{name} = {_format(_default_of(cfg, section, name))}")
        lines.append("")
    return "\n".join(lines)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return parse_config("")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
