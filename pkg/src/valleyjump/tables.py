"""CSV emission: comma separated, LF endings, mandatory header, floats as
scientific notation with 10 significant digits."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence

from . import theory
from .dynamics import TrajectoryRecord
from .landscape import LandscapeParams

TRAJECTORY_HEADER = ("t", "x", "y", "loss", "valley")
SWITCH_HEADER = ("t_switch",)
THEORY_HEADER = ("y", "delta_s", "d11_flat", "d11_sharp", "t_eff", "log_k_flat",
                 "log_k_sharp", "p_flat_eq", "p_flat_ss")
FREEZING_HEADER = ("delta_s", "epsilon", "phi", "y_freeze", "p_flat_tr", "in_regime")
ORACLE_HEADER = ("quantity", "closed_form", "oracle", "rel_err", "in_regime")
HEATMAP_HEADER = ("eta", "sigma", "delta_s", "n_runs", "n_diverged", "p_flat", "p_flat_se",
                  "mean_t_freeze", "mean_t_freeze_norm", "p_flat_ss_theory", "p_flat_tr_theory")


def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.9e}"
    return str(v)


def render(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write(path: str | Path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render(header, rows))
    return path


def read(path: str | Path) -> tuple[list[str], list[dict[str, str]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        return list(reader.fieldnames or []), rows


def trajectory_rows(rec: TrajectoryRecord):
    for t, x, y, val in rec.states:
        yield int(t), float(x), float(y), float(val), "flat" if x >= 0 else "sharp"


def switch_rows(rec: TrajectoryRecord):
    for t in rec.switches:
        yield (int(t),)


def theory_rows(params: LandscapeParams, ys, delta_ss):
    for ds in delta_ss:
        for y in ys:
            d = theory.diffusion_and_temperature(params, ds, y)
            m = theory.kramers_mfpt(params, ds, y)
            ss = theory.p_flat_steady(params, ds, y)
            yield (float(y), float(ds), d.d11_flat, d.d11_sharp, d.t_eff,
                   m.log_k_flat, m.log_k_sharp, ss.p_flat_eq, ss.p_flat_ss)


def freezing_rows(params: LandscapeParams, delta_ss, epsilons):
    for eps in epsilons:
        for ds in delta_ss:
            fp = theory.freezing_point(params, ds, eps)
            tr = theory.p_flat_transient(params, ds, eps)
            yield float(ds), float(eps), fp.phi, fp.y_freeze, tr.p_flat_tr, fp.in_regime


def heatmap_rows(cells):
    for c in cells:
        s = c.stats
        yield (c.eta, c.sigma, c.delta_s, s.n_total, s.n_diverged, s.p_flat, s.p_flat_se,
               s.mean_t_freeze, s.mean_t_freeze_norm, c.p_flat_ss_theory, c.p_flat_tr_theory)
