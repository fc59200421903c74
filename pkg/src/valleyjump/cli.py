"""``valleyjump`` command line: simulate, sweep, theory, validate, plot.

Exit codes: 0 success, 1 failed validation, 2 usage or configuration error.
Tables go to files (or stdout for ``theory --delta-s``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import svg, tables, theory
from .config import ConfigError, RunConfig, load_config
from .dynamics import simulate
from .experiments import sweep
from .landscape import DomainError

log = logging.getLogger("valleyjump")


class UsageError(Exception):
    pass


def _csv_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = 0
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat 'section.key = value' config file")
    common.add_argument("--output-dir", help="directory for CSV/SVG output (overrides run.output_dir)")
    common.add_argument("-v", "--verbose", action="store_true", help="log provenance and progress")

    ap = argparse.ArgumentParser(prog="valleyjump", description="Two-valley SGD noise model.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="one trajectory to CSV")
    p.add_argument("--eta", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--t-max", type=_positive_int)
    p.add_argument("--seed", type=int)
    p.add_argument("--run-index", type=int, default=0)

    p = sub.add_parser("sweep", parents=[common], help="(eta, sigma) ensemble sweep")
    p.add_argument("--seed", type=int, help="base seed of the sweep")
    p.add_argument("--runs", type=_positive_int, help="runs per cell (even)")
    p.add_argument("--t-max", type=_positive_int)
    p.add_argument("--threads", type=_positive_int)

    p = sub.add_parser("theory", parents=[common], help="closed-form tables")
    p.add_argument("--delta-s", type=_csv_list, help="print freezing rows for these noise levels")
    p.add_argument("--y", type=_csv_list, help="y values for the theory table")
    p.add_argument("--epsilon", type=_csv_list, help="freezing constants (default from config)")

    p = sub.add_parser("validate", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", type=_csv_list, help="criterion numbers to run, e.g. 1,3,5")

    p = sub.add_parser("plot", parents=[common], help="render existing CSVs to SVG")
    p.add_argument("csv", nargs="+", help="heatmap, trajectory or freezing CSV files")
    return ap


def _out_dir(args, cfg: RunConfig) -> Path:
    out = Path(args.output_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args, cfg: RunConfig) -> int:
    dyn = cfg.dynamics
    overrides = {k: v for k, v in (("eta", args.eta), ("sigma", args.sigma),
                                   ("t_max", args.t_max), ("seed", args.seed)) if v is not None}
    try:
        dyn = replace(dyn, **overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rec = simulate(cfg.landscape, dyn, run_index=args.run_index)
    out = _out_dir(args, cfg)
    if "csv" in cfg.formats:
        tables.write(out / "trajectory.csv", tables.TRAJECTORY_HEADER, tables.trajectory_rows(rec))
        tables.write(out / "switches.csv", tables.SWITCH_HEADER, tables.switch_rows(rec))
    if "svg" in cfg.formats:
        st = rec.states
        (out / "trajectory.svg").write_text(svg.line_plot(
            {"x": (st[:, 0], st[:, 1]), "y": (st[:, 0], st[:, 2])},
            "trajectory", "t", "coordinate"), encoding="utf-8")
    print(f"simulate: {rec.n_switches} switches, final valley {rec.final_valley}, "
          f"diverged={rec.diverged}, output in {out}", file=sys.stderr)
    return 0


def _heatmap_svgs(out: Path, rows: list[dict[str, str]]):
    etas = sorted({float(r["eta"]) for r in rows})
    sigmas = sorted({float(r["sigma"]) for r in rows})
    for col, title in (("p_flat", "flat-valley fraction"),
                       ("mean_t_freeze_norm", "normalized freezing time")):
        grid = [[float("nan")] * len(sigmas) for _ in etas]
        for r in rows:
            grid[etas.index(float(r["eta"]))][sigmas.index(float(r["sigma"]))] = float(r[col])
        (out / f"heatmap_{col}.svg").write_text(
            svg.heatmap(grid, etas, sigmas, title, "eta", "sigma"), encoding="utf-8")


def cmd_sweep(args, cfg: RunConfig) -> int:
    grid = cfg.grid
    try:
        if args.seed is not None:
            grid = replace(grid, base_seed=args.seed)
        if args.runs is not None:
            grid = replace(grid, runs_per_cell=args.runs)
        dyn = cfg.dynamics if args.t_max is None else replace(cfg.dynamics, t_max=args.t_max)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    total = len(grid.eta_values) * len(grid.sigma_values)
    done = []

    def progress(i, j):
        done.append((i, j))
        log.info("cell %d/%d done (eta index %d, sigma index %d)", len(done), total, i, j)

    cells = sweep(cfg.landscape, grid, dyn, cfg.epsilon, threads=args.threads, progress=progress)
    out = _out_dir(args, cfg)
    path = tables.write(out / "heatmap.csv", tables.HEATMAP_HEADER, tables.heatmap_rows(cells))
    if "svg" in cfg.formats:
        _heatmap_svgs(out, tables.read(path)[1])
    if "csv" not in cfg.formats:
        path.unlink()
    print(f"sweep: {total} cells written to {out}", file=sys.stderr)
    return 0


def cmd_theory(args, cfg: RunConfig) -> int:
    eps = args.epsilon or (cfg.epsilon,)
    if args.delta_s is not None:
        if any(not (d > 0) for d in args.delta_s):
            raise UsageError("--delta-s values must be positive")
        sys.stdout.write(tables.render(tables.FREEZING_HEADER,
                                       tables.freezing_rows(cfg.landscape, args.delta_s, eps)))
        return 0
    ys = args.y or tuple(np.linspace(0.5, 10.0, 20))
    dss = tuple(np.logspace(-4, -1, 13))
    out = _out_dir(args, cfg)
    tables.write(out / "theory.csv", tables.THEORY_HEADER, tables.theory_rows(cfg.landscape, ys, dss))
    fdss = tuple(np.logspace(-6, -1, 26))
    path = tables.write(out / "freezing.csv", tables.FREEZING_HEADER,
                        tables.freezing_rows(cfg.landscape, fdss, eps))
    if "svg" in cfg.formats:
        _freezing_svg(out, tables.read(path)[1])
    print(f"theory: tables written to {out}", file=sys.stderr)
    return 0


def _freezing_svg(out: Path, rows):
    series = {}
    for r in rows:
        xs, ys = series.setdefault(f"eps={float(r['epsilon']):g}", ([], []))
        xs.append(float(r["delta_s"]))
        ys.append(float(r["p_flat_tr"]))
    (out / "freezing.svg").write_text(
        svg.line_plot(series, "transient flat-valley probability", "delta_s", "p_flat_tr", log_x=True),
        encoding="utf-8")


def cmd_validate(args, cfg: RunConfig) -> int:
    from . import acceptance

    only = None
    if args.only:
        only = {int(v) for v in args.only}
        if not only <= set(acceptance.CRITERIA):
            raise UsageError(f"unknown criterion in --only: {sorted(only - set(acceptance.CRITERIA))}")
    results = acceptance.run_all(only, report=lambda line: print(line, flush=True))
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed")
    return 0 if n_pass == len(results) else 1


def cmd_plot(args, cfg: RunConfig) -> int:
    out = _out_dir(args, cfg)
    for name in args.csv:
        try:
            header, rows = tables.read(name)
        except OSError as exc:
            raise UsageError(f"cannot read {name}: {exc}") from None
        stem = Path(name).stem
        if tuple(header) == tables.HEATMAP_HEADER:
            _heatmap_svgs(out, rows)
        elif tuple(header) == tables.TRAJECTORY_HEADER:
            t = [float(r["t"]) for r in rows]
            series = {c: (t, [float(r[c]) for r in rows]) for c in ("x", "y")}
            (out / f"{stem}.svg").write_text(svg.line_plot(series, stem, "t", "coordinate"),
                                             encoding="utf-8")
        elif tuple(header) == tables.FREEZING_HEADER:
            _freezing_svg(out, rows)
        else:
            raise UsageError(f"{name}: unrecognized CSV header")
    return 0


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "theory": cmd_theory,
            "validate": cmd_validate, "plot": cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        level=logging.INFO if args.verbose else logging.WARNING)
    threads = os.environ.get("VALLEYJUMP_THREADS")
    if threads is not None and not (threads.isdigit() and int(threads) > 0):
        print(f"error: VALLEYJUMP_THREADS must be a positive integer, got {threads!r}", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, DomainError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
