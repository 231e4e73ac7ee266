"""Command-line front end: simulate, sweep, bounds, validate.

Config files are JSON with SI units in the key names.  Time-series
outputs are UTF-8 CSV with an embedded manifest in '#'-prefixed header
lines; analysis results go to JSON sidecars.  Exit codes: 0 success,
2 config error, 3 solver failure, 4 fit failure.
"""

import argparse
import dataclasses
import json
import math
import sys
import time

import numpy as np

from . import __version__, analysis, classical, dirac, pauli
from .constants import CODATA2018
from .fields import LaserConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_FIT = 4

CONFIG_KEYS = {
    "wavelength_m": float,
    "peak_field_V_per_m": float,
    "ellipticity_rad": float,
    "ramp_cycles": float,
    "total_cycles": float,
    "n_max": int,
    "rel_tolerance": float,
    "theory": str,
}
OPTIONAL_KEYS = {"n_max": 8, "rel_tolerance": 1e-10, "theory": "dirac"}


class ConfigError(ValueError):
    pass


def load_config(path):
    """Parse and validate a JSON run config; returns a plain dict."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
        data = json.loads(raw)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config %s: line %d column %d: %s"
                          % (path, exc.lineno, exc.colno, exc.msg)) from exc
    if not isinstance(data, dict):
        raise ConfigError("config %s: top level must be an object" % path)
    cfg = {}
    for key, typ in CONFIG_KEYS.items():
        if key not in data:
            if key in OPTIONAL_KEYS:
                cfg[key] = OPTIONAL_KEYS[key]
                continue
            raise ConfigError("config %s: missing required key %r"
                              % (path, key))
        value = data[key]
        if typ is str:
            if not isinstance(value, str):
                raise ConfigError("config %s: key %r must be a string"
                                  % (path, key))
        elif not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError("config %s: key %r must be a number"
                              % (path, key))
        cfg[key] = typ(value)
    unknown = set(data) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError("config %s: unknown key(s) %s"
                          % (path, ", ".join(sorted(unknown))))
    if cfg["theory"] not in analysis.THEORIES:
        raise ConfigError("config %s: theory must be one of %s"
                          % (path, ", ".join(analysis.THEORIES)))
    try:
        to_laser_config(cfg)
    except ValueError as exc:
        raise ConfigError("config %s: %s" % (path, exc)) from exc
    return cfg


def to_laser_config(cfg):
    return LaserConfig(wavelength=cfg["wavelength_m"],
                       peak_field=cfg["peak_field_V_per_m"],
                       ellipticity=cfg["ellipticity_rad"],
                       ramp_cycles=cfg["ramp_cycles"],
                       total_cycles=cfg["total_cycles"])


@dataclasses.dataclass
class RunManifest:
    config: dict
    theory: str
    tool_version: str
    deterministic: str = ("seed-free: identical config and build give "
                          "byte-identical CSV output")
    wall_seconds: float | None = None

    def deterministic_dict(self):
        d = dataclasses.asdict(self)
        d.pop("wall_seconds")
        return d


def _fmt(x):
    return "%.17g" % x


def write_series_csv(path, manifest, times, sy_h, sz_h, norm, neg_pop):
    lines = ["# spinbeam time series",
             "# manifest: " + json.dumps(manifest.deterministic_dict(),
                                         sort_keys=True),
             "t_s,sy_over_hbar,sz_over_hbar,norm,neg_energy_pop"]
    for row in zip(times, sy_h, sz_h, norm, neg_pop):
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_series_csv(path):
    """Inverse of write_series_csv: (manifest dict, column dict)."""
    manifest = None
    with open(path, encoding="utf-8") as fh:
        rows = []
        header = None
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# manifest: "):
                manifest = json.loads(line[len("# manifest: "):])
                continue
            if line.startswith("#") or not line:
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append([float(v) for v in line.split(",")])
    data = np.array(rows)
    return manifest, {name: data[:, i] for i, name in enumerate(header)}


def _run_series(cfg_dict):
    cfg = to_laser_config(cfg_dict)
    theory = cfg_dict["theory"]
    n_max = cfg_dict["n_max"]
    tol = cfg_dict["rel_tolerance"]
    hbar = CODATA2018.hbar
    if theory == "dirac":
        spec = dirac.BasisSpec(n_max=n_max, k=cfg.wavenumber)
        s = dirac.propagate(dirac.DiracState.ground(spec), cfg, spec, tol=tol)
        return cfg, s.times, s.sy / hbar, s.sz / hbar, s.norm, s.neg_pop
    if theory in ("pauli-rel", "pauli-nonrel"):
        tog = pauli.FULL if theory == "pauli-rel" else pauli.SIGMA_B_ONLY
        s = pauli.propagate_pauli(pauli.PauliState.ground(n_max), cfg,
                                  toggles=tog, n_max=n_max, tol=tol)
        zeros = np.zeros_like(s.times)
        return cfg, s.times, s.sy / hbar, s.sz / hbar, s.norm, zeros
    s = classical.propagate_full_classical(classical.ClassicalState.at_rest(),
                                           cfg, tol=tol)
    norm = np.linalg.norm(s.spin, axis=1) / (0.5 * hbar)
    zeros = np.zeros_like(s.times)
    return cfg, s.times, s.sy / hbar, s.sz / hbar, norm, zeros


def _precession_dict(result):
    return {"omega_rad_per_s": result.omega,
            "amplitude_J_s": result.amplitude,
            "phase_rad": result.phase,
            "fit_residual": result.fit_residual,
            "method": result.method,
            "theory": result.theory}


def cmd_simulate(args):
    cfg_dict = load_config(args.config)
    manifest = RunManifest(config=cfg_dict, theory=cfg_dict["theory"],
                           tool_version=__version__)
    t0 = time.monotonic()
    try:
        cfg, times, sy_h, sz_h, norm, neg = _run_series(cfg_dict)
    except (RuntimeError, FloatingPointError) as exc:
        print("solver failure: %s" % exc, file=sys.stderr)
        return EXIT_SOLVER
    manifest.wall_seconds = time.monotonic() - t0
    write_series_csv(args.output, manifest, times, sy_h, sz_h, norm, neg)
    sidecar = {"manifest": dataclasses.asdict(manifest), "precession": None}
    hbar = CODATA2018.hbar
    plateau = (cfg.ramp_time, cfg.total_time - cfg.ramp_time)
    try:
        result = analysis.extract_frequency_phase_slope(
            times, sy_h * hbar, sz_h * hbar, cfg.period, plateau,
            theory=cfg_dict["theory"])
        sidecar["precession"] = _precession_dict(result)
    except (analysis.InsufficientSignalError, ValueError) as exc:
        sidecar["precession_note"] = str(exc)
    with open(_sidecar_path(args.output), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print("wrote %s" % args.output)
    return EXIT_OK


def _sidecar_path(csv_path):
    return (csv_path[:-4] if csv_path.endswith(".csv") else csv_path) + ".json"


def _parse_values(raw):
    try:
        values = [float(v) for v in raw.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError("invalid sweep values %r" % raw) from exc
    if not values:
        raise ConfigError("sweep needs at least one value")
    return values


def cmd_sweep(args):
    cfg_dict = load_config(args.config)
    values = _parse_values(args.values)
    template = to_laser_config(cfg_dict)
    manifest = RunManifest(config=cfg_dict, theory=cfg_dict["theory"],
                           tool_version=__version__)
    t0 = time.monotonic()
    points, fit, failure = [], None, None
    try:
        if args.axis == "field":
            fit = analysis.field_sweep(cfg_dict["theory"], template, values,
                                       n_max=cfg_dict["n_max"],
                                       tol=cfg_dict["rel_tolerance"])
            points = [(e, om, None) for e, om in fit.field_points]
        else:
            out = analysis.ellipticity_sweep(template, values,
                                             n_max=cfg_dict["n_max"],
                                             tol=cfg_dict["rel_tolerance"])
            points = out
    except analysis.SweepError as exc:
        failure = str(exc)
        points = [(e, om, None) for e, om in exc.partial]
    except ValueError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    manifest.wall_seconds = time.monotonic() - t0

    if args.axis == "field":
        axis_name, value_name = "peak_field_V_per_m", "omega_rad_per_s"
    else:
        axis_name, value_name = "ellipticity_rad", "omega_over_circular"
    lines = ["# spinbeam sweep",
             "# manifest: " + json.dumps(manifest.deterministic_dict(),
                                         sort_keys=True),
             "%s,%s,fit_residual" % (axis_name, value_name)]
    for row in points:
        lines.append(",".join("" if v is None else _fmt(v) for v in row))
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

    sidecar = {"manifest": dataclasses.asdict(manifest), "axis": args.axis}
    if fit is not None:
        sidecar["scaling_fit"] = {
            "exponent": fit.exponent, "prefactor": fit.prefactor,
            "r_squared": fit.r_squared,
            "field_points": [list(p) for p in fit.field_points]}
    if args.axis == "ellipticity" and points and failure is None:
        sidecar["ellipticity_points"] = [list(p) for p in points]
    if failure is not None:
        sidecar["error"] = failure
    with open(_sidecar_path(args.output), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if failure is not None:
        print("sweep failed: %s" % failure, file=sys.stderr)
        return EXIT_FIT
    print("wrote %s" % args.output)
    return EXIT_OK


def cmd_bounds(args):
    bounds = analysis.experimental_bounds(args.wavelength_m, args.n_cycles)
    report = {
        "wavelength_m": args.wavelength_m,
        "n_cycles": args.n_cycles,
        "e_min_V_per_m": bounds.e_min,
        "e_max_V_per_m": bounds.e_max,
        "feasible": bounds.feasible,
        "intensity_at_e_min_W_per_cm2": bounds.intensity_at(bounds.e_min),
        "intensity_at_e_max_W_per_cm2": bounds.intensity_at(bounds.e_max),
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_validate(args):
    cfg_dict = load_config(args.config)
    cfg = to_laser_config(cfg_dict)
    report = analysis.perturbative_validity(cfg)
    out = {"config": cfg_dict,
           "perturbative_validity": {
               "field_vs_photon_momentum": report.field_vs_photon_momentum,
               "field_vs_rest_energy": report.field_vs_rest_energy,
               "ratio_photon_momentum": report.ratio_photon_momentum,
               "ratio_rest_energy": report.ratio_rest_energy,
               "valid": report.valid}}
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spinbeam",
        description="Electron spin precession in a standing laser wave")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one solver; write CSV + JSON")
    p.add_argument("config")
    p.add_argument("-o", "--output", required=True, help="CSV output path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="field or ellipticity sweep")
    p.add_argument("config")
    p.add_argument("--axis", choices=("field", "ellipticity"), required=True)
    p.add_argument("--values", required=True,
                   help="comma-separated axis values")
    p.add_argument("-o", "--output", required=True, help="CSV output path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bounds", help="field-strength feasibility window")
    p.add_argument("--wavelength-m", type=float, required=True,
                   dest="wavelength_m")
    p.add_argument("--n-cycles", type=int, required=True, dest="n_cycles")
    p.add_argument("-o", "--output", help="JSON output path (default stdout)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("validate", help="check a config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
