"""Command-line entry point: scenario config, sweep execution, CSV emission.

Subcommands: sweep-receiver, sweep-transceiver, sweep-grid, dof, bounds.
Settings come from an optional ``key = value`` config file plus flags
(flags win); the fully resolved configuration is printed before any
computation runs.

Sweep output is an RFC-4180-style CSV with the fixed column set

    scenario,d_m,m1,m2,ref_m,mi_nats,mi_bits,mi_ref_nats,abs_gap,n_used,model_tag,wall_time_s

plus a JSON sidecar (same basename, .meta suffix) holding the resolved
config, tool version, measured timings, and slope fits. The CSV itself
is byte-identical across reruns of the same resolved config on one
platform; per-cell wall times are therefore written as 0.0 placeholders
unless --timings is given (real timings always go to the sidecar).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .experiments import (
    SweepRow,
    fit_convergence_slope,
    sweep_grid,
    sweep_receiver,
    sweep_transceiver,
)
from .models import default_ref_m, dof_estimate, noise_rx
from .physics import SystemConfig
from .spectra import midpoint_grid

CSV_COLUMNS = ("scenario", "d_m", "m1", "m2", "ref_m", "mi_nats", "mi_bits",
               "mi_ref_nats", "abs_gap", "n_used", "model_tag", "wall_time_s")

BOUNDS_COLUMNS = ("scenario", "d_m", "m", "n_rx", "scaled_gap", "gap_bound", "within_bound")

DOF_COLUMNS = ("scenario", "d_m", "ref_m", "threshold_rel", "eigen_count", "analytic_dof")

DEFAULT_M_LIST = (5, 10, 20, 40, 80, 100, 160)
DEFAULT_DISTANCES = (10.0, 1.0, 0.1)


class ConfigError(ValueError):
    """Invalid, unknown, or missing run configuration."""


@dataclass
class RunConfig:
    """Fully resolved run settings; validated before any computation."""

    scenario: str
    wavelength: float = 0.04
    length: float = 2.0
    distance: float = 10.0
    distances: tuple[float, ...] = DEFAULT_DISTANCES
    power: float = 1.0
    noise: float = 2.0
    ref_m: int | None = None
    inner_points: int | None = None
    m_list: tuple[int, ...] = DEFAULT_M_LIST
    m1_list: tuple[int, ...] = DEFAULT_M_LIST
    m2_list: tuple[int, ...] = DEFAULT_M_LIST
    out: str | None = None
    keep_going: bool = False
    log_base: str = "e"
    timings: bool = False

    def system_config(self) -> SystemConfig:
        try:
            return SystemConfig(wavelength_m=self.wavelength, aperture_m=self.length,
                                distance_m=self.distance, power_density=self.power,
                                noise_density=self.noise)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def resolved_dict(self) -> dict:
        d = dataclasses.asdict(self)
        cfg = self.system_config()
        d["ref_m"] = self.ref_m if self.ref_m is not None else default_ref_m(cfg)
        d["inner_points"] = (self.inner_points if self.inner_points is not None
                             else cfg.default_inner_points())
        return d


def _parse_int_list(raw: str, key: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(tok) for tok in raw.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated integers, got {raw!r}") from None
    if not vals:
        raise ConfigError(f"{key}: list must be nonempty")
    return vals


def _parse_float_list(raw: str, key: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(tok) for tok in raw.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {raw!r}") from None
    if not vals:
        raise ConfigError(f"{key}: list must be nonempty")
    return vals


_FILE_PARSERS = {
    "scenario": str,
    "wavelength": float,
    "length": float,
    "distance": float,
    "distances": lambda v: _parse_float_list(v, "distances"),
    "power": float,
    "noise": float,
    "ref_m": int,
    "inner_points": int,
    "m_list": lambda v: _parse_int_list(v, "m_list"),
    "m1_list": lambda v: _parse_int_list(v, "m1_list"),
    "m2_list": lambda v: _parse_int_list(v, "m2_list"),
    "out": str,
    "keep_going": lambda v: v.strip().lower() in ("1", "true", "yes"),
    "log_base": str,
    "timings": lambda v: v.strip().lower() in ("1", "true", "yes"),
}


def _load_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment; unknown keys are fatal."""
    out: dict = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _FILE_PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            out[key] = _FILE_PARSERS[key](value)
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: invalid value for {key}: {value!r}") from None
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capmimo",
        description="Mutual information of continuous vs discretized line apertures.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
            ("sweep-receiver", "discretize the receiver, sweep (distance, m)"),
            ("sweep-transceiver", "discretize both sides with m1 = m2 = m"),
            ("sweep-grid", "Cartesian (m1, m2) sweep at one distance"),
            ("dof", "significant-eigenvalue count vs the analytic rule"),
            ("bounds", "noise-rescaling gap vs its quadrature bound over an m ladder")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--out", help="output CSV path (sidecar written next to it)")
        p.add_argument("--scenario", help="scenario label for output rows")
        p.add_argument("--wavelength", type=float, help="carrier wavelength [m]")
        p.add_argument("--length", type=float, help="aperture length [m]")
        p.add_argument("--distance", type=float, help="single transceiver distance [m]")
        p.add_argument("--distances", help="comma list of distances [m] for sweeps")
        p.add_argument("--power", type=float, help="transmit power density")
        p.add_argument("--noise", type=float, help="receiver noise density")
        p.add_argument("--ref-m", type=int, dest="ref_m", help="reference grid size")
        p.add_argument("--inner-points", type=int, dest="inner_points",
                       help="source-quadrature sample count")
        p.add_argument("--m-list", dest="m_list", help="comma list of antenna counts")
        p.add_argument("--m1-list", dest="m1_list", help="comma list of transmit counts")
        p.add_argument("--m2-list", dest="m2_list", help="comma list of receive counts")
        p.add_argument("--keep-going", action="store_true", default=None,
                       help="exit 0 even if some cells fail")
        p.add_argument("--log-base", choices=("e", "2"), dest="log_base",
                       help="base for values printed to stdout")
        p.add_argument("--timings", action="store_true", default=None,
                       help="write real per-cell wall times into the CSV "
                            "(forgoes byte-identical reruns)")
    return parser


def parse_config(argv: list[str]) -> tuple[str, RunConfig]:
    """Resolve command + settings from flags and the optional config file."""
    args = _build_parser().parse_args(argv)
    settings: dict = {}
    if args.config:
        settings.update(_load_config_file(args.config))
    for key in _FILE_PARSERS:
        if key in ("distances", "m_list", "m1_list", "m2_list"):
            raw = getattr(args, key, None)
            if raw is not None:
                parser_fn = _FILE_PARSERS[key]
                settings[key] = parser_fn(raw)
        elif getattr(args, key, None) is not None:
            settings[key] = getattr(args, key)
    settings.setdefault("scenario", args.command)
    if settings.get("log_base") not in (None, "e", "2"):
        raise ConfigError(f"log_base must be 'e' or '2', got {settings['log_base']!r}")
    try:
        rc = RunConfig(**settings)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    rc.system_config()  # fail fast on invalid physics values
    return args.command, rc


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row_record(row: SweepRow, timings: bool) -> list[str]:
    bits = None if row.mi_nats is None else row.mi_nats / math.log(2.0)
    tag = row.model_tag if row.error is None else f"error:{row.error}"
    wall = row.wall_time_s if timings else 0.0
    return [_fmt(v) for v in (row.scenario, row.d_m, row.m1, row.m2, row.ref_m,
                              row.mi_nats, bits, row.mi_ref_nats, row.abs_gap,
                              row.n_used, tag, wall)]


def write_rows_csv(rows: list[SweepRow], path: Path, timings: bool = False) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(_row_record(row, timings))
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_rows_csv(path: Path) -> list[SweepRow]:
    """Inverse of write_rows_csv over the SweepRow fields (mi_bits is derived)."""
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header in {path}: {reader.fieldnames}")
        for rec in reader:
            tag = rec["model_tag"]
            error = None
            if tag.startswith("error:"):
                tag, error = "error", tag[len("error:"):]
            rows.append(SweepRow(
                scenario=rec["scenario"], d_m=float(rec["d_m"]),
                m1=int(rec["m1"]) if rec["m1"] else None, m2=int(rec["m2"]),
                ref_m=int(rec["ref_m"]),
                mi_nats=float(rec["mi_nats"]) if rec["mi_nats"] else None,
                mi_ref_nats=float(rec["mi_ref_nats"]) if rec["mi_ref_nats"] else None,
                abs_gap=float(rec["abs_gap"]) if rec["abs_gap"] else None,
                n_used=float(rec["n_used"]) if rec["n_used"] else None,
                model_tag=tag, wall_time_s=float(rec["wall_time_s"]), error=error))
    return rows


def _meta_path(out: Path) -> Path:
    return out.with_suffix(".meta")


def _write_meta(out: Path, command: str, rc: RunConfig, extra: dict) -> None:
    payload = {"tool": "capmimo", "version": __version__, "command": command,
               "resolved_config": rc.resolved_dict()}
    payload.update(extra)
    _meta_path(out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                               encoding="utf-8")


def _print_resolved(command: str, rc: RunConfig) -> None:
    print(f"# capmimo {__version__} :: {command}")
    for key, value in sorted(rc.resolved_dict().items()):
        print(f"{key} = {value}")


def _stdout_mi(nats: float, rc: RunConfig) -> str:
    if rc.log_base == "2":
        return f"{nats / math.log(2.0):.6f} bits"
    return f"{nats:.6f} nats"


def _slope_fits_by_distance(rows: list[SweepRow]) -> dict:
    fits = {}
    for d in sorted({r.d_m for r in rows}):
        subset = [r for r in rows if r.d_m == d]
        try:
            fit = fit_convergence_slope(subset)
        except ValueError:
            continue
        fits[repr(d)] = {"slope": fit.slope, "intercept": fit.intercept,
                         "r_squared": fit.r_squared, "m_range": list(fit.m_range)}
    return fits


def _finish_sweep(rows: list[SweepRow], command: str, rc: RunConfig,
                  started: float, extra: dict | None = None) -> int:
    if rc.out is None:
        raise ConfigError(f"{command} requires --out (or out = ... in the config file)")
    out = Path(rc.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        write_rows_csv(rows, out, timings=rc.timings)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return 1
    errors = [r for r in rows if r.error is not None]
    meta = {"rows": len(rows),
            "slope_fits": _slope_fits_by_distance(rows),
            "errors": [{"d_m": r.d_m, "m1": r.m1, "m2": r.m2, "error": r.error}
                       for r in errors],
            "timings": {"total_s": time.perf_counter() - started,
                        "cells_s": [r.wall_time_s for r in rows]}}
    if extra:
        meta.update(extra)
    _write_meta(out, command, rc, meta)
    for d in sorted({r.d_m for r in rows}):
        refs = [r.mi_ref_nats for r in rows if r.d_m == d and r.mi_ref_nats is not None]
        if refs:
            print(f"d={d:g}: reference {_stdout_mi(refs[0], rc)}")
    print(f"wrote {len(rows)} rows to {out}")
    if errors:
        print(f"{len(errors)} cell(s) failed", file=sys.stderr)
        return 0 if rc.keep_going else 1
    return 0


def _run_dof(command: str, rc: RunConfig) -> int:
    cfg = rc.system_config()
    est = dof_estimate(cfg, rc.ref_m, inner_points=rc.inner_points)
    print(f"eigen_count = {est.eigen_count} (threshold {est.threshold_rel:g} of largest)")
    print(f"analytic_dof = {est.analytic}")
    if rc.out is not None:
        out = Path(rc.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(DOF_COLUMNS)
        ref_m = rc.ref_m if rc.ref_m is not None else default_ref_m(cfg)
        writer.writerow([rc.scenario, _fmt(rc.distance), ref_m,
                         _fmt(est.threshold_rel), est.eigen_count, _fmt(est.analytic)])
        out.write_text(buf.getvalue(), encoding="utf-8")
        _write_meta(out, command, rc, {"eigen_count": est.eigen_count,
                                       "analytic_dof": est.analytic})
        print(f"wrote {out}")
    return 0


def _run_bounds(command: str, rc: RunConfig) -> int:
    cfg = rc.system_config()
    records = []
    print(f"{'m':>8} {'n_rx':>18} {'scaled_gap':>14} {'gap_bound':>14} ok")
    for m in rc.m_list:
        control = noise_rx(midpoint_grid(cfg.aperture_m, m), cfg, rc.inner_points)
        ok = control.gap <= control.gap_bound
        records.append((m, control))
        print(f"{m:>8} {control.n_value:>18.10e} {control.gap:>14.6e} "
              f"{control.gap_bound:>14.6e} {'yes' if ok else 'NO'}")
    if rc.out is not None:
        out = Path(rc.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(BOUNDS_COLUMNS)
        for m, control in records:
            writer.writerow([rc.scenario, _fmt(rc.distance), m, _fmt(control.n_value),
                             _fmt(control.gap), _fmt(control.gap_bound),
                             str(control.gap <= control.gap_bound).lower()])
        out.write_text(buf.getvalue(), encoding="utf-8")
        _write_meta(out, command, rc,
                    {"gaps": {str(m): c.gap for m, c in records},
                     "bounds": {str(m): c.gap_bound for m, c in records}})
        print(f"wrote {out}")
    return 0 if all(c.gap <= c.gap_bound for _, c in records) else 1


def run(command: str, rc: RunConfig) -> int:
    """Execute one subcommand against a resolved RunConfig."""
    if command.startswith("sweep-") and rc.out is None:
        raise ConfigError(f"{command} requires --out (or out = ... in the config file)")
    _print_resolved(command, rc)
    started = time.perf_counter()
    cfg = rc.system_config()
    if command == "sweep-receiver":
        rows = sweep_receiver(cfg, rc.distances, rc.m_list, rc.ref_m,
                              rc.inner_points, scenario=rc.scenario)
        return _finish_sweep(rows, command, rc, started)
    if command == "sweep-transceiver":
        rows = sweep_transceiver(cfg, rc.distances, rc.m_list, rc.ref_m,
                                 rc.inner_points, scenario=rc.scenario)
        return _finish_sweep(rows, command, rc, started)
    if command == "sweep-grid":
        grid = sweep_grid(cfg, rc.distance, rc.m1_list, rc.m2_list, rc.ref_m,
                          rc.inner_points, scenario=rc.scenario)
        print(f"symmetry_gap = {grid.symmetry_gap!r}")
        return _finish_sweep(list(grid.rows), command, rc, started,
                             extra={"symmetry_gap": grid.symmetry_gap})
    if command == "dof":
        return _run_dof(command, rc)
    if command == "bounds":
        return _run_bounds(command, rc)
    raise ConfigError(f"unknown command {command!r}")


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        command, rc = parse_config(argv)
        return run(command, rc)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
