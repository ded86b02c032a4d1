"""Command-line front end: single-point evaluations, Fig.-2-style
linewidth sweeps, discretized-mode validation runs, and field snapshots,
exported as CSV or JSON.

CSV output is byte-deterministic: fixed column order, every number
printed with repr-stable %.12g, rows sorted by the swept parameter, and
a `# key=value` metadata header that records everything needed to re-run
the job.  Wall-clock timing goes to stderr only, never into the CSV.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .core import AtomParams, ModelConfig, PulseParams
from .errors import ConfigError, Lambda2pError, NumericalError
from .probability import (
    QuadratureOptions,
    TransitionResult,
    cascaded_probability,
    transition_probability,
    transition_probability_asymptotic,
)

FMT = "%.12g"

FIG2_PANELS = {
    "A": dict(gamma_a=1.0, gamma_b=0.5, delta1=0.001),
    "B": dict(gamma_a=1.0, gamma_b=0.5, delta1=100.0),
    "C": dict(gamma_a=1.0, gamma_b=0.5, delta1=0.5),
    "D": dict(gamma_a=1.0, gamma_b=1.0, delta1=0.1),
    "inset": dict(gamma_a=1.0, gamma_b=1.0, delta1=0.001),
}

SWEEPABLE = ("delta1", "delta2", "gamma_a", "gamma_b")


@dataclass(frozen=True)
class SweepAxis:
    param: str
    scale: str  # "log" | "linear"
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.param not in SWEEPABLE:
            raise ConfigError(f"unknown sweep parameter {self.param!r}; choose from {SWEEPABLE}")
        if self.scale not in ("log", "linear"):
            raise ConfigError(f"scale must be 'log' or 'linear', got {self.scale!r}")
        if self.count < 2:
            raise ConfigError(f"sweep count must be >= 2, got {self.count}")
        if not self.min < self.max:
            raise ConfigError(f"sweep needs min < max, got [{self.min}, {self.max}]")
        if self.scale == "log" and self.min <= 0:
            raise ConfigError("log sweep requires min > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.logspace(math.log10(self.min), math.log10(self.max), self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class RunConfig:
    """Everything one job needs; serialized verbatim into CSV headers."""

    mode: str
    model: ModelConfig
    axis: Optional[SweepAxis] = None
    t: Optional[float] = None
    tol: float = 1e-7
    out: Optional[str] = None
    format: str = "csv"
    grid_modes: int = 256
    grid_width: float = 30.0
    dt: float = 0.01
    extra: Tuple[Tuple[str, str], ...] = ()

    def header_items(self) -> List[Tuple[str, str]]:
        m = self.model
        items = [
            ("tool", "lambda2p " + __version__),
            ("mode", self.mode),
            ("gamma_a", FMT % m.atom.gamma_a),
            ("gamma_b", FMT % m.atom.gamma_b),
            ("delta1", FMT % m.pulse.delta1),
            ("delta2", FMT % m.pulse.delta2),
            ("tol", FMT % self.tol),
        ]
        if self.axis is not None:
            items += [
                ("sweep_param", self.axis.param),
                ("sweep_scale", self.axis.scale),
                ("sweep_min", FMT % self.axis.min),
                ("sweep_max", FMT % self.axis.max),
                ("sweep_count", str(self.axis.count)),
            ]
        if self.t is not None:
            items.append(("t", FMT % self.t))
        items.extend(self.extra)
        return items


@dataclass
class SweepResult:
    config: RunConfig
    rows: List[Tuple[float, float, float, float, float]] = field(default_factory=list)
    # rows: (swept value, p_exact, p_cascaded, estimated_error, wall_seconds)

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: r[0])

    def csv_lines(self) -> List[str]:
        lines = ["# %s=%s" % kv for kv in self.config.header_items()]
        lines.append("delta2,p_exact,p_cascaded,err" if self.config.axis is None
                     or self.config.axis.param == "delta2"
                     else f"{self.config.axis.param},p_exact,p_cascaded,err")
        for v, p, pc, err, _secs in self.sorted_rows():
            lines.append(",".join(FMT % x for x in (v, p, pc, err)))
        return lines

    def json_obj(self):
        return {
            "config": dict(self.config.header_items()),
            "rows": [
                {"value": v, "p_exact": p, "p_cascaded": pc,
                 "err": err, "seconds": secs}
                for v, p, pc, err, secs in self.sorted_rows()
            ],
        }


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _worker_count(n_jobs: int) -> int:
    cap = os.environ.get("LAMBDA2P_THREADS")
    workers = os.cpu_count() or 1
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"LAMBDA2P_THREADS must be an integer, got {cap!r}")
    return max(1, min(workers, n_jobs))


def _sweep_point(args):
    """One sweep row; module-level so it pickles for worker processes."""
    value, param, base, tol = args
    t0 = time.perf_counter()
    atom_kw = dict(gamma_a=base.atom.gamma_a, gamma_b=base.atom.gamma_b)
    pulse_kw = dict(delta1=base.pulse.delta1, delta2=base.pulse.delta2)
    (atom_kw if param.startswith("gamma") else pulse_kw)[param] = value
    cfg = ModelConfig(AtomParams(**atom_kw), PulseParams(**pulse_kw))
    quad = QuadratureOptions(rel_tol=tol)
    res = transition_probability_asymptotic(cfg, quad)
    pc = cascaded_probability(cfg)
    return (value, res.p, pc, res.estimated_error, time.perf_counter() - t0)


def run_sweep(config: RunConfig) -> SweepResult:
    axis = config.axis
    jobs = [(float(v), axis.param, config.model, config.tol) for v in axis.values()]
    workers = _worker_count(len(jobs))
    result = SweepResult(config)
    if workers == 1:
        rows = [_sweep_point(j) for j in jobs]
    else:
        import concurrent.futures as cf
        with cf.ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    result.rows = rows
    return result


def run_point(config: RunConfig) -> dict:
    model = config.model
    quad = QuadratureOptions(rel_tol=config.tol)
    if config.t is None or math.isinf(config.t):
        res = transition_probability_asymptotic(model, quad)
    else:
        res = transition_probability(config.t, model, quad)
    return {
        "config": dict(config.header_items()),
        "t": "inf" if math.isinf(res.t) else res.t,
        "p_exact": res.p,
        "p_cascaded": cascaded_probability(model),
        "estimated_error": res.estimated_error,
        "term_breakdown": list(res.term_breakdown),
    }


def run_oracle_check(config: RunConfig) -> Tuple[List[Tuple[float, float, float, float]], float]:
    from .oracle import ModeGrid, init_state, integrate

    model = config.model
    grid = ModeGrid(center=0.0, half_width=config.grid_width, n_modes=config.grid_modes)
    gamma = model.atom.gamma_total
    t_end = config.t if config.t is not None else 40.0 / gamma
    dt = config.dt / gamma
    state = init_state(model, grid)
    sample_times = np.linspace(0.0, t_end, 41)
    report = integrate(state, model, grid, t_end, dt, sample_times=sample_times)

    quad = QuadratureOptions(rel_tol=config.tol)
    rows = []
    for t, p_oracle in zip(report.times, report.p_ab):
        p_exact = 0.0 if t == 0 else transition_probability(float(t), model, quad).p
        rows.append((float(t), p_exact, float(p_oracle), abs(p_exact - float(p_oracle))))
    return rows, report.norm_drift


def run_field(config: RunConfig, r_min: float, r_max: float, r_points: int) -> Tuple[str, str]:
    from .amplitudes import sample_phi_BA, sample_psi_A

    if config.t is None or config.t < 0:
        raise ConfigError("field snapshot needs --t >= 0")
    r = np.linspace(r_min, r_max, r_points)
    psi = sample_psi_A(config.model, config.t, r)
    phiba = sample_phi_BA(config.model, config.t, r, r)

    head = ["# %s=%s" % kv for kv in config.header_items()]
    psi_lines = head + ["r,t,re,im,abs2"]
    for i, ri in enumerate(psi.r1):
        v = psi.values[i]
        psi_lines.append(",".join(FMT % x for x in (ri, config.t, v.real, v.imag, abs(v) ** 2)))
    phi_lines = head + ["r,r2,t,re,im,abs2"]
    for i, r1i in enumerate(phiba.r1):
        for j, r2j in enumerate(phiba.r2):
            v = phiba.values[i, j]
            phi_lines.append(",".join(
                FMT % x for x in (r1i, r2j, config.t, v.real, v.imag, abs(v) ** 2)))
    return "\n".join(psi_lines) + "\n", "\n".join(phi_lines) + "\n"


def _load_config_file(path: str) -> dict:
    """Flat key=value file; '#' comments; no sections required."""
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_string("[run]\n" + fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}")
    return dict(parser["run"])


_FLOAT_KEYS = ("gamma_a", "gamma_b", "delta1", "delta2", "t", "tol",
               "grid_width", "dt", "min", "max", "r_min", "r_max")
_INT_KEYS = ("grid_modes", "count", "r_points")


def _merged(args: argparse.Namespace, defaults: dict) -> dict:
    """File values fill in, CLI flags win, hard-coded defaults last."""
    merged = dict(defaults)
    if getattr(args, "config", None):
        file_vals = _load_config_file(args.config)
        for k, v in file_vals.items():
            key = k.replace("-", "_")
            if key not in merged:
                raise ConfigError(f"unknown config key {k!r} in {args.config}")
            merged[key] = v
    for key in merged:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    for key in _FLOAT_KEYS:
        if key in merged and merged[key] is not None and not isinstance(merged[key], float):
            try:
                merged[key] = float(merged[key])
            except ValueError:
                raise ConfigError(f"{key} must be a number, got {merged[key]!r}")
    for key in _INT_KEYS:
        if key in merged and merged[key] is not None and not isinstance(merged[key], int):
            try:
                merged[key] = int(merged[key])
            except ValueError:
                raise ConfigError(f"{key} must be an integer, got {merged[key]!r}")
    return merged


_MODEL_DEFAULTS = dict(gamma_a=1.0, gamma_b=0.5, delta1=0.5, delta2=0.5,
                       t=None, tol=1e-7, out=None, format=None,
                       grid_modes=256, grid_width=30.0, dt=0.01)


def _model_from(vals: dict) -> ModelConfig:
    return ModelConfig(
        AtomParams(gamma_a=vals["gamma_a"], gamma_b=vals["gamma_b"]),
        PulseParams(delta1=vals["delta1"], delta2=vals["delta2"]))


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--gamma-a", dest="gamma_a", type=float)
    p.add_argument("--gamma-b", dest="gamma_b", type=float)
    p.add_argument("--delta1", type=float)
    p.add_argument("--delta2", type=float)
    p.add_argument("--t", type=float, help="evaluation time; omit for the asymptote")
    p.add_argument("--tol", type=float, help="relative quadrature tolerance")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--grid-modes", dest="grid_modes", type=int)
    p.add_argument("--grid-width", dest="grid_width", type=float)
    p.add_argument("--dt", type=float, help="oracle step in units of 1/Gamma")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lambda2p",
        description="Two-photon transfer in a waveguide-coupled lambda atom: "
                    "exact vs cascaded model.")
    ap.add_argument("--version", action="version", version="lambda2p " + __version__)
    sub = ap.add_subparsers(dest="mode", required=True)

    p = sub.add_parser("point", help="p(t) or p(infinity) for one parameter set")
    _add_common(p)

    p = sub.add_parser("sweep", help="sweep one parameter, both models per row")
    _add_common(p)
    p.add_argument("--param", choices=SWEEPABLE)
    p.add_argument("--scale", choices=("log", "linear"))
    p.add_argument("--min", type=float)
    p.add_argument("--max", type=float)
    p.add_argument("--count", type=int)

    p = sub.add_parser("fig2", help="preset delta2 sweeps (panels A-D, inset)")
    _add_common(p)
    p.add_argument("--panel", choices=tuple(FIG2_PANELS), required=True)
    p.add_argument("--count", type=int)

    p = sub.add_parser("oracle-check", help="analytic vs discretized-mode p_ab(t)")
    _add_common(p)
    p.add_argument("--check-tol", dest="check_tol", type=float, default=0.02,
                   help="pass/fail threshold on max |difference|")

    p = sub.add_parser("field", help="snapshot |psi_A|^2 and |phi_BA|^2 grids")
    _add_common(p)
    p.add_argument("--r-min", dest="r_min", type=float)
    p.add_argument("--r-max", dest="r_max", type=float)
    p.add_argument("--r-points", dest="r_points", type=int)
    return ap


_MODE_DEFAULTS = {
    "sweep": dict(param="delta2", scale="log", min=1e-3, max=1e2, count=40),
    "fig2": dict(count=40),
    "field": dict(r_min=None, r_max=None, r_points=81),
}


def _run(args: argparse.Namespace) -> int:
    defaults = dict(_MODEL_DEFAULTS)
    defaults.update(_MODE_DEFAULTS.get(args.mode, {}))
    vals = _merged(args, defaults)
    model = _model_from(vals)

    if args.mode == "point":
        cfg = RunConfig("point", model, t=vals["t"], tol=vals["tol"],
                        out=vals["out"], format=vals["format"] or "json")
        res = run_point(cfg)
        if cfg.format == "csv":
            lines = ["# %s=%s" % kv for kv in cfg.header_items()]
            lines.append("t,p_exact,p_cascaded,err")
            lines.append(",".join([
                "inf" if res["t"] == "inf" else FMT % res["t"],
                FMT % res["p_exact"], FMT % res["p_cascaded"],
                FMT % res["estimated_error"]]))
            _emit("\n".join(lines) + "\n", cfg.out)
        else:
            _emit(json.dumps(res, indent=2, sort_keys=True) + "\n", cfg.out)
        return 0

    if args.mode in ("sweep", "fig2"):
        if args.mode == "fig2":
            preset = FIG2_PANELS[args.panel]
            vals.update(preset)
            model = _model_from(vals)
            axis = SweepAxis("delta2", "log", 1e-3, 1e2, vals["count"])
            extra = (("panel", args.panel),)
        else:
            axis = SweepAxis(vals["param"], vals["scale"], vals["min"], vals["max"], vals["count"])
            extra = ()
        cfg = RunConfig(args.mode, model, axis=axis, tol=vals["tol"],
                        out=vals["out"], format=vals["format"] or "csv", extra=extra)
        t0 = time.perf_counter()
        result = run_sweep(cfg)
        print(f"{args.mode}: {axis.count} points in {time.perf_counter() - t0:.1f} s",
              file=sys.stderr)
        if cfg.format == "csv":
            _emit("\n".join(result.csv_lines()) + "\n", cfg.out)
        else:
            _emit(json.dumps(result.json_obj(), indent=2, sort_keys=True) + "\n", cfg.out)
        return 0

    if args.mode == "oracle-check":
        cfg = RunConfig("oracle-check", model, t=vals["t"], tol=vals["tol"],
                        out=vals["out"], format=vals["format"] or "csv",
                        grid_modes=vals["grid_modes"], grid_width=vals["grid_width"],
                        dt=vals["dt"])
        rows, drift = run_oracle_check(cfg)
        max_diff = max(r[3] for r in rows)
        ok = max_diff <= args.check_tol
        if cfg.format == "csv":
            lines = ["# %s=%s" % kv for kv in cfg.header_items()]
            lines += [f"# norm_drift={FMT % drift}", f"# max_diff={FMT % max_diff}",
                      "t,p_analytic,p_oracle,abs_diff"]
            lines += [",".join(FMT % x for x in row) for row in rows]
            _emit("\n".join(lines) + "\n", cfg.out)
        else:
            _emit(json.dumps({
                "config": dict(cfg.header_items()),
                "norm_drift": drift, "max_diff": max_diff, "passed": ok,
                "rows": [dict(zip(("t", "p_analytic", "p_oracle", "abs_diff"), r))
                         for r in rows],
            }, indent=2, sort_keys=True) + "\n", cfg.out)
        print(f"oracle-check: max |diff| = {max_diff:.3e} "
              f"({'PASS' if ok else 'FAIL'} at {args.check_tol:g}), "
              f"norm drift {drift:.2e}", file=sys.stderr)
        if not ok:
            raise NumericalError(
                f"oracle disagreement {max_diff:.3e} exceeds {args.check_tol:g}")
        return 0

    if args.mode == "field":
        cfg = RunConfig("field", model, t=vals["t"], tol=vals["tol"],
                        out=vals["out"], format=vals["format"] or "csv")
        if cfg.t is None:
            raise ConfigError("field snapshot needs --t")
        span = cfg.t * model.c
        r_min = vals["r_min"] if vals["r_min"] is not None else (-2.0 * span if span > 0 else -1.0)
        r_max = vals["r_max"] if vals["r_max"] is not None else max(span, 1.0)
        psi_csv, phi_csv = run_field(cfg, r_min, r_max, vals["r_points"])
        if cfg.out:
            base, ext = os.path.splitext(cfg.out)
            ext = ext or ".csv"
            with open(base + "_psi" + ext, "w") as fh:
                fh.write(psi_csv)
            with open(base + "_phiba" + ext, "w") as fh:
                fh.write(phi_csv)
        else:
            sys.stdout.write(psi_csv)
            sys.stdout.write(phi_csv)
        return 0

    raise ConfigError(f"unknown mode {args.mode!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help/--version
        return int(exc.code or 0)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Lambda2pError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
