"""Command-line front end: batch runs from a JSON config, CSV/SVG artifacts.

A run resolves one operator (gallery name or matrix file), executes its
task list in order, and writes one CSV per artifact plus a summary table
of max(truth/bound) per bound method.  The process exits nonzero when a
domination check fails (1), on config errors (2), on violated bound
hypotheses (3), and on numerical failures (4).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bnd
from ._parallel import pmap
from .errors import HypothesisError, NumericsError, SpectrumError
from .gallery import GALLERY_BUILDERS, build_by_name
from .linalg import OperatorMatrix, load_matrix, matrix_to_json, semigroup_norm
from .recursion import extend_majorant
from .resolvent import hille_yosida_check, profile as sweep_profile, r_of_omega
from .splitting import split_report
from . import linalg

__all__ = ["RunConfig", "run", "plot_data", "main"]

_EXIT_OK = 0
_EXIT_DOMINATION = 1
_EXIT_CONFIG = 2
_EXIT_HYPOTHESIS = 3
_EXIT_NUMERIC = 4

_KNOWN_TASKS = ("profile", "bound", "validate", "split", "recursion")
_BOUND_METHODS = ("gps", "propa", "contrb", "contrbprime", "power", "phi_limit")

# domination verdicts allow this much slack for roundoff in the truth norm
_DOMINATION_RTOL = 1e-9


@dataclass
class RunConfig:
    """Validated, normalised run description (JSON-compatible)."""

    operator: dict
    tasks: list[dict]
    output_dir: str = "semibound_out"
    seed: int = 0

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ValueError("config root must be an object")
        op = doc.get("operator")
        if not isinstance(op, dict) or not ({"gallery", "file"} & set(op)):
            raise ValueError("config needs operator.gallery or operator.file")
        if "gallery" in op and op["gallery"] not in GALLERY_BUILDERS:
            raise ValueError(f"unknown gallery operator {op['gallery']!r}")
        tasks = doc.get("tasks")
        if not isinstance(tasks, list) or not tasks:
            raise ValueError("config needs a nonempty task list")
        norm_tasks = [cls._normalise_task(t) for t in tasks]
        return cls(
            operator={k: op[k] for k in sorted(op)},
            tasks=norm_tasks,
            output_dir=str(doc.get("output_dir", "semibound_out")),
            seed=int(doc.get("seed", 0)),
        )

    @staticmethod
    def _normalise_task(task: dict) -> dict:
        if not isinstance(task, dict) or "task" not in task:
            raise ValueError(f"malformed task entry: {task!r}")
        kind = task["task"]
        if kind not in _KNOWN_TASKS:
            raise ValueError(f"unknown task {kind!r}; choose from {_KNOWN_TASKS}")
        out = dict(task)
        if kind in ("bound", "split", "validate"):
            grid = [float(t) for t in task.get("t_grid", [0.5, 1.0, 2.0, 4.0])]
            if not grid or any(t <= 0 for t in grid) or \
                    any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError("t_grid must be positive and ascending")
            out["t_grid"] = grid
        if kind == "bound":
            methods = task.get("methods", ["gps"])
            bad = set(methods) - set(_BOUND_METHODS)
            if bad:
                raise ValueError(f"unknown bound methods {sorted(bad)}")
            out["methods"] = list(methods)
        if kind == "profile":
            omegas = [float(w) for w in task.get("omegas", [])]
            if not omegas:
                raise ValueError("profile task needs a nonempty omegas list")
            out["omegas"] = omegas
        if kind == "split" and "omega_tilde" not in task:
            raise ValueError("split task needs omega_tilde")
        return out

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise ValueError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ValueError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "tasks": self.tasks,
            "output_dir": self.output_dir,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _resolve_operator(config: RunConfig) -> OperatorMatrix:
    op = config.operator
    if "file" in op:
        path = op["file"]
        if not os.path.exists(path):
            raise ValueError(f"matrix file not found: {path}")
        return load_matrix(path)
    params = dict(op.get("params", {}))
    if op["gallery"] == "random":
        params.setdefault("seed", config.seed)
    return build_by_name(op["gallery"], params)


def _parse_weight(spec, om: OperatorMatrix) -> bnd.WeightSpec:
    """Weight from config; "auto" is the numerical-abscissa envelope."""
    if spec in (None, "auto"):
        return bnd.ExponentialWeight(M_hat=1.0, omega_hat=om.numerical_abscissa)
    if isinstance(spec, dict) and spec.get("type") == "exponential":
        return bnd.ExponentialWeight(M_hat=float(spec["M_hat"]),
                                     omega_hat=float(spec["omega_hat"]))
    if isinstance(spec, dict) and spec.get("type") == "tabulated":
        return bnd.TabulatedWeight(grid=spec["grid"], values=spec["values"],
                                   horizon=float(spec["horizon"]))
    raise ValueError(f"malformed weight spec: {spec!r}")


def _truth_curve(om: OperatorMatrix, t_grid) -> bnd.BoundCurve:
    vals = pmap(lambda t: semigroup_norm(om, t), t_grid)
    return bnd.BoundCurve(t_grid=np.asarray(t_grid), values=np.asarray(vals),
                          method="truth", params={})


def _sampled_majorant(om: OperatorMatrix, T: float, cells: int = 64) -> bnd.TabulatedWeight:
    """Tabulated m >= ||exp(tA)|| on [0, T): node values are per-cell sups.

    Each sampled norm is inflated by the worst in-cell growth factor
    e^{max(0, numerical_abscissa) h}, and nodes take the max of the two
    adjacent cell bounds so interpolation never dips below the truth.
    """
    h = T / cells
    grid = np.arange(cells) * h
    norms = pmap(lambda t: semigroup_norm(om, t), grid)
    growth = math.exp(max(0.0, om.numerical_abscissa) * h) * (1.0 + 1e-9)
    cell_bound = np.asarray(norms) * growth
    node_vals = np.maximum(cell_bound, np.append(cell_bound[1:], cell_bound[-1]))
    return bnd.TabulatedWeight(grid=grid, values=node_vals, horizon=T)


@dataclass
class _SummaryRow:
    method: str
    max_ratio: float

    @property
    def ok(self) -> bool:
        return self.max_ratio <= 1.0 + _DOMINATION_RTOL


def _task_profile(om, task, outdir, index) -> list[_SummaryRow]:
    prof = sweep_profile(om, task["omegas"], task.get("rel_width", 1e-4))
    _atomic_write(os.path.join(outdir, f"{index:02d}_profile.csv"), prof.to_csv())
    return []


def _gps_curve(om, r_lo, m, omega, t_grid, split_mode) -> bnd.BoundCurve:
    def one(t):
        if split_mode == "optimal":
            a, val = bnd.optimal_split(r_lo, m, omega, t)
            return val
        return bnd.gps_bound(r_lo, m, omega, t, t / 2.0)

    vals = pmap(one, t_grid)
    return bnd.BoundCurve(
        t_grid=np.asarray(t_grid), values=np.asarray(vals), method="gps",
        params={"omega": omega, "r_lo": r_lo, "split": split_mode})


def _task_bound(om, task, outdir, index) -> list[_SummaryRow]:
    t_grid = task["t_grid"]
    m = _parse_weight(task.get("m", "auto"), om)
    rel_width = float(task.get("rel_width", 1e-3))
    split_mode = task.get("split", "half")
    truth = _truth_curve(om, t_grid)
    _atomic_write(os.path.join(outdir, f"{index:02d}_truth.csv"), truth.to_csv())

    alpha0 = om.spectral_abscissa
    omegas = [float(w) for w in task.get("omegas", [])] or [alpha0 + 0.5]
    curves: list[bnd.BoundCurve] = []
    rows: list[_SummaryRow] = []

    r_cache: dict[float, float] = {}

    def r_lo(w: float) -> float:
        if w not in r_cache:
            r_cache[w] = r_of_omega(om, w, rel_width).r_lo
        return r_cache[w]

    for method in task["methods"]:
        if method == "gps":
            for k, w in enumerate(omegas):
                curve = _gps_curve(om, r_lo(w), m, w, t_grid, split_mode)
                curves.append(curve)
                rows.append(_summarise(f"gps(omega={w:g})", truth, curve))
                _atomic_write(
                    os.path.join(outdir, f"{index:02d}_bound_gps_omega{k}.csv"),
                    curve.to_csv())
            continue
        if method in ("propa", "contrb"):
            if not isinstance(m, bnd.ExponentialWeight):
                raise HypothesisError(f"{method} needs an exponential majorant")
            w = omegas[0]
            if w >= m.omega_hat:
                raise HypothesisError(
                    f"{method} needs omega < omega_hat: omega={w}, "
                    f"omega_hat={m.omega_hat}")
            if method == "propa":
                const = bnd.propa_constant(m.M_hat, m.omega_hat, w, r_lo(w))
                vals = [const * math.exp(w * t) for t in t_grid]
                params = {"omega": w, "constant": const}
            else:
                picks = [bnd.optimal_contrb(m.M_hat, m.omega_hat, w, r_lo(w), t)
                         for t in t_grid]
                vals = [v for _, v in picks]
                params = {"omega": w, "s_values": [s for s, _ in picks]}
            curve = bnd.BoundCurve(t_grid=np.asarray(t_grid),
                                   values=np.asarray(vals),
                                   method=method, params=params)
        elif method in ("contrbprime", "power"):
            if alpha0 >= 0.0:
                raise HypothesisError(
                    f"{method} needs r(0) > 0, but the spectral abscissa "
                    f"is {alpha0:.6g} >= 0")
            M_hat = m.M_hat if isinstance(m, bnd.ExponentialWeight) else 1.0
            if isinstance(m, bnd.ExponentialWeight) and m.omega_hat > 0.0:
                raise HypothesisError(
                    f"{method} needs a bound valid at omega_hat = 0")
            r0 = r_lo(0.0)
            if method == "contrbprime":
                vals = [bnd.contrbprime_bound(M_hat, r0, bnd.contrb_schedule(t), t)
                        for t in t_grid]
                params = {"r0": r0, "schedule": "t/(1+t)"}
            else:
                alpha = task.get("alpha")
                alpha = float(alpha) if alpha is not None else r0 / (4.0 * M_hat)
                picks = [bnd.optimal_power(M_hat, r0, t, alpha) for t in t_grid]
                vals = [v for _, v in picks]
                params = {"r0": r0, "alpha": alpha,
                          "N_values": [n for n, _ in picks]}
            curve = bnd.BoundCurve(t_grid=np.asarray(t_grid),
                                   values=np.asarray(vals),
                                   method=method, params=params)
        elif method == "phi_limit":
            eps0 = float(task.get("epsilon0", 1.0))
            ts = [t for t in t_grid if t >= 1.0]
            if not ts:
                raise ValueError("phi_limit needs t >= 1 in the grid")
            n_prof = int(task.get("phi_profile_points", 48))
            offs = np.geomspace(1e-3, eps0, n_prof)
            prof = sweep_profile(om, list(alpha0 + offs), rel_width)
            curve = bnd.phi_bound_curve(prof, alpha0, eps0, m, ts)
        else:  # pragma: no cover
            raise ValueError(f"unhandled method {method}")
        curves.append(curve)
        rows.append(_summarise(method, truth, curve))
        _atomic_write(os.path.join(outdir, f"{index:02d}_bound_{method}.csv"),
                      curve.to_csv())

    if task.get("svg"):
        _atomic_write(os.path.join(outdir, f"{index:02d}_curves.svg"),
                      plot_data(curves, truth))
    return rows


def _summarise(name: str, truth: bnd.BoundCurve, curve: bnd.BoundCurve) -> _SummaryRow:
    vals = np.exp(np.interp(truth.t_grid, curve.t_grid, np.log(curve.values)))
    ratio = float(np.max(truth.values / vals))
    return _SummaryRow(method=name, max_ratio=ratio)


def _task_validate(om, task, outdir, index) -> list[_SummaryRow]:
    omega = task.get("omega")
    omega = float(omega) if omega is not None else om.numerical_abscissa
    lams = [float(x) for x in task.get("lambdas", [])] or \
        [omega + d for d in (0.5, 1.0, 2.0)]
    report = hille_yosida_check(om, omega, lams, task["t_grid"])
    lines = [f"# omega={omega}", "check,point,value,limit,ok"]
    for lam, norm, ok in zip(report.lambdas, report.resolvent_norms,
                             report.resolvent_ok):
        lines.append(f"resolvent,{lam:.17g},{norm:.17g},"
                     f"{1.0 / (lam - omega):.17g},{bool(ok)}")
    for t, norm, ok in zip(report.t_grid, report.semigroup_norms,
                           report.semigroup_ok):
        lines.append(f"semigroup,{t:.17g},{norm:.17g},"
                     f"{math.exp(omega * t):.17g},{bool(ok)}")
    for z_re, z_im in task.get("laplace_points", []):
        res = linalg.laplace_identity_residual(
            om, complex(z_re, z_im),
            float(task.get("horizon", 40.0)), int(task.get("panels", 2048)))
        lines.append(f"laplace,{z_re:+.6g}{z_im:+.6g}j,{res:.17g},1e-06,"
                     f"{res < 1e-6}")
    _atomic_write(os.path.join(outdir, f"{index:02d}_validate.csv"),
                  "\n".join(lines) + "\n")
    return []


def _task_split(om, task, outdir, index) -> list[_SummaryRow]:
    m = _parse_weight(task.get("m", "auto"), om)
    report = split_report(
        om, float(task["omega_tilde"]), m, task["t_grid"],
        nodes=int(task.get("nodes", 256)),
        rel_width=float(task.get("rel_width", 1e-3)))
    _atomic_write(os.path.join(outdir, f"{index:02d}_split.csv"), report.to_csv())
    truth = _truth_curve(om, task["t_grid"])
    total_bound = report.leading_norm + report.remainder_bound
    rows = [
        _SummaryRow("split", float(np.max(truth.values / total_bound))),
        _SummaryRow("split_remainder", float(np.max(
            report.remainder_true / np.maximum(report.remainder_bound, 1e-300)))),
    ]
    return rows


def _task_recursion(om, task, outdir, index) -> list[_SummaryRow]:
    T = float(task.get("T", 1.0))
    t_max = float(task.get("t_max", 32.0))
    omega = task.get("omega")
    omega = float(omega) if omega is not None else om.spectral_abscissa + 0.5
    r = r_of_omega(om, omega, float(task.get("rel_width", 1e-3))).r_lo
    m0 = _sampled_majorant(om, T, cells=int(task.get("cells", 64)))
    h = task.get("h")
    state = extend_majorant(m0, omega, r, t_max,
                            h=float(h) if h is not None else None)
    _atomic_write(os.path.join(outdir, f"{index:02d}_recursion.csv"),
                  state.to_csv())
    check_t = [float(t) for t in task.get("check_t", [])] or \
        [t for t in (T, 2 * T, 4 * T, 8 * T) if t <= t_max]
    worst = 0.0
    for t in check_t:
        bound = state.m_at(t) * math.exp(omega * t)
        worst = max(worst, semigroup_norm(om, t) / bound)
    return [_SummaryRow("appendix", worst)]


_TASK_HANDLERS = {
    "profile": _task_profile,
    "bound": _task_bound,
    "validate": _task_validate,
    "split": _task_split,
    "recursion": _task_recursion,
}


def run(config: RunConfig) -> int:
    """Execute a config; returns the exit status (0 ok, 1 domination fail)."""
    om = _resolve_operator(config)
    outdir = config.output_dir
    os.makedirs(outdir, exist_ok=True)
    _atomic_write(os.path.join(outdir, "run_config.json"), config.to_json() + "\n")
    rows: list[_SummaryRow] = []
    for index, task in enumerate(config.tasks):
        rows.extend(_TASK_HANDLERS[task["task"]](om, task, outdir, index))
    lines = ["method,max_truth_over_bound,ok"]
    for row in rows:
        lines.append(f"{row.method},{row.max_ratio:.17g},{row.ok}")
    _atomic_write(os.path.join(outdir, "summary.csv"), "\n".join(lines) + "\n")
    for row in rows:
        status = "ok" if row.ok else "DOMINATION FAILED"
        print(f"{row.method}: max truth/bound = {row.max_ratio:.6g} [{status}]")
    return _EXIT_OK if all(r.ok for r in rows) else _EXIT_DOMINATION


# SVG emission: fixed layout, every coordinate rounded, no timestamps, so
# identical inputs give identical bytes.

_SVG_W, _SVG_H = 800, 500
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 160, 30, 50
_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#e377c2", "#7f7f7f"]


def plot_data(curves, truth: bnd.BoundCurve) -> str:
    """Semilog-y SVG chart of bound curves against the truth curve.

    Curves on other grids are resampled to the truth grid by linear
    interpolation of log-values.
    """
    curves = list(curves)
    if not curves:
        raise ValueError("need at least one bound curve to plot")
    ts = truth.t_grid
    series = [("truth", truth.values, "#000000")]
    for k, c in enumerate(curves):
        vals = np.exp(np.interp(ts, c.t_grid, np.log(c.values)))
        series.append((c.method, vals, _PALETTE[k % len(_PALETTE)]))

    logs = np.concatenate([np.log10(v) for _, v, _ in series])
    y_lo, y_hi = float(np.min(logs)), float(np.max(logs))
    if y_hi - y_lo < 1e-9:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    x_lo, x_hi = float(ts[0]), float(ts[-1])
    if x_hi - x_lo < 1e-12:
        x_hi = x_lo + 1.0
    plot_w = _SVG_W - _MARGIN_L - _MARGIN_R
    plot_h = _SVG_H - _MARGIN_T - _MARGIN_B

    def px(t: float) -> float:
        return _MARGIN_L + (t - x_lo) / (x_hi - x_lo) * plot_w

    def py(logv: float) -> float:
        return _MARGIN_T + (y_hi - logv) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect x="0" y="0" width="{_SVG_W}" height="{_SVG_H}" fill="#ffffff"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#222222" stroke-width="1"/>',
    ]
    # x ticks: 5 evenly spaced; y ticks: integer decades
    for k in range(5):
        t = x_lo + (x_hi - x_lo) * k / 4.0
        x = px(t)
        out.append(f'<line x1="{x:.2f}" y1="{_MARGIN_T + plot_h}" '
                   f'x2="{x:.2f}" y2="{_MARGIN_T + plot_h + 5}" '
                   f'stroke="#222222"/>')
        out.append(f'<text x="{x:.2f}" y="{_MARGIN_T + plot_h + 20}" '
                   f'font-size="11" text-anchor="middle">{t:.3g}</text>')
    dec_lo, dec_hi = math.floor(y_lo), math.ceil(y_hi)
    step = max(1, (dec_hi - dec_lo) // 8)
    for d in range(dec_lo, dec_hi + 1, step):
        if not y_lo <= d <= y_hi:
            continue
        y = py(float(d))
        out.append(f'<line x1="{_MARGIN_L - 5}" y1="{y:.2f}" '
                   f'x2="{_MARGIN_L}" y2="{y:.2f}" stroke="#222222"/>')
        out.append(f'<text x="{_MARGIN_L - 8}" y="{y + 4:.2f}" font-size="11" '
                   f'text-anchor="end">1e{d}</text>')
    out.append(f'<text x="{_MARGIN_L + plot_w / 2:.2f}" y="{_SVG_H - 10}" '
               f'font-size="12" text-anchor="middle">t</text>')

    for idx, (name, vals, color) in enumerate(series):
        pts = " ".join(f"{px(float(t)):.2f},{py(float(np.log10(v))):.2f}"
                       for t, v in zip(ts, vals))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        ly = _MARGIN_T + 15 + 16 * idx
        lx = _SVG_W - _MARGIN_R + 10
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{lx + 24}" y="{ly}" font-size="11">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _parse_param(text: str):
    key, _, raw = text.partition("=")
    if not _:
        raise argparse.ArgumentTypeError(f"--param expects key=value, got {text!r}")
    try:
        return key, json.loads(raw)
    except json.JSONDecodeError:
        return key, raw


def _operator_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gallery", choices=sorted(GALLERY_BUILDERS))
    parser.add_argument("--matrix", help="path to a matrix file")
    parser.add_argument("--param", action="append", type=_parse_param,
                        default=[], metavar="KEY=VALUE",
                        help="gallery parameter (repeatable)")
    parser.add_argument("--out", default="semibound_out", help="output directory")
    parser.add_argument("--seed", type=int, default=0)


def _operator_dict(args) -> dict:
    if bool(args.gallery) == bool(args.matrix):
        raise ValueError("pass exactly one of --gallery / --matrix")
    if args.gallery:
        return {"gallery": args.gallery, "params": dict(args.param)}
    return {"file": args.matrix}


def _csv_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="semibound",
        description="Certified semigroup decay bounds from resolvent data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a JSON config")
    p_run.add_argument("config")

    p_gal = sub.add_parser("gallery", help="emit a gallery operator matrix")
    p_gal.add_argument("name", choices=sorted(GALLERY_BUILDERS))
    p_gal.add_argument("--param", action="append", type=_parse_param,
                       default=[], metavar="KEY=VALUE")
    p_gal.add_argument("--emit", action="store_true",
                       help="print the matrix file to stdout")
    p_gal.add_argument("--out", help="write the matrix file here")

    p_prof = sub.add_parser("profile", help="sweep r(omega) over a grid")
    _operator_args(p_prof)
    p_prof.add_argument("--omegas", required=True, type=_csv_floats)
    p_prof.add_argument("--rel-width", type=float, default=1e-4)

    p_bound = sub.add_parser("bound", help="evaluate decay bounds")
    _operator_args(p_bound)
    p_bound.add_argument("--methods", default="gps")
    p_bound.add_argument("--t-grid", type=_csv_floats, default=[0.5, 1, 2, 4])
    p_bound.add_argument("--omegas", type=_csv_floats, default=[])
    p_bound.add_argument("--split", choices=["half", "optimal"], default="half")
    p_bound.add_argument("--svg", action="store_true")

    p_split = sub.add_parser("split", help="spectral splitting bound")
    _operator_args(p_split)
    p_split.add_argument("--omega-tilde", type=float, required=True)
    p_split.add_argument("--t-grid", type=_csv_floats, default=[1, 2, 4])
    p_split.add_argument("--nodes", type=int, default=256)

    p_rec = sub.add_parser("recursion", help="majorant extension march")
    _operator_args(p_rec)
    p_rec.add_argument("--T", type=float, default=1.0)
    p_rec.add_argument("--t-max", type=float, default=32.0)
    p_rec.add_argument("--omega", type=float)

    args = parser.parse_args(argv)
    try:
        if args.command == "gallery":
            om = build_by_name(args.name, dict(args.param))
            doc = matrix_to_json(om)
            if args.out:
                _atomic_write(args.out, doc + "\n")
            if args.emit or not args.out:
                print(doc)
            return _EXIT_OK
        if args.command == "run":
            return run(RunConfig.from_file(args.config))
        # one-shot subcommands build a single-task config
        task: dict
        if args.command == "profile":
            task = {"task": "profile", "omegas": args.omegas,
                    "rel_width": args.rel_width}
        elif args.command == "bound":
            task = {"task": "bound", "methods": args.methods.split(","),
                    "t_grid": args.t_grid, "omegas": args.omegas,
                    "split": args.split, "svg": args.svg}
        elif args.command == "split":
            task = {"task": "split", "omega_tilde": args.omega_tilde,
                    "t_grid": args.t_grid, "nodes": args.nodes}
        else:
            task = {"task": "recursion", "T": args.T, "t_max": args.t_max}
            if args.omega is not None:
                task["omega"] = args.omega
        config = RunConfig.from_dict({
            "operator": _operator_dict(args),
            "tasks": [task],
            "output_dir": args.out,
            "seed": args.seed,
        })
        return run(config)
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except (SpectrumError, HypothesisError) as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return _EXIT_HYPOTHESIS
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
