"""Render spin-evolution, scaling, and ellipticity figures.

Inputs are the CSV/JSON files written by the ``spinbeam`` CLI; every
figure is written as both PNG and SVG.  Rendering never modifies the
input files.
"""

import argparse
import dataclasses
import json
import math
import os
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

KINDS = ("evolution", "scaling", "ellipticity")

# CODATA 2018, duplicated here on purpose: this package consumes only
# the CLI's file contract and must not import the simulation package.
ELEMENTARY_CHARGE = 1.602176634e-19     # C
ELECTRON_MASS = 9.1093837015e-31        # kg
SPEED_OF_LIGHT = 299792458.0            # m/s
HBAR = 6.62607015e-34 / (2.0 * math.pi)  # J s

REQUIRED_COLUMNS = {
    "evolution": ("t_s", "sy_over_hbar", "sz_over_hbar"),
    "scaling": ("peak_field_V_per_m", "omega_rad_per_s"),
    "ellipticity": ("ellipticity_rad", "omega_over_circular"),
}


class SchemaError(ValueError):
    """The input file does not match the CLI's file contract."""


@dataclasses.dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    kind: str               # evolution | scaling | ellipticity
    output: str             # base path; .png and .svg are appended
    xlabel: str | None = None
    ylabel: str | None = None
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("kind must be one of %s" % (KINDS,))


def load_csv(path):
    """Read a CLI CSV: (manifest dict or None, column-name -> array)."""
    if not os.path.exists(path):
        raise SchemaError("input file %s does not exist" % path)
    manifest, header, rows = None, None, []
    with open(path, encoding="utf-8") as fh:
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
            rows.append([float(v) if v else math.nan
                         for v in line.split(",")])
    if header is None or not rows:
        raise SchemaError("file %s has no CSV header or no data rows"
                          % path)
    data = np.array(rows)
    return manifest, {name: data[:, i] for i, name in enumerate(header)}


def require_columns(columns, kind, path):
    for name in REQUIRED_COLUMNS[kind]:
        if name not in columns:
            raise SchemaError("file %s is missing required column %r "
                              "for a %s plot" % (path, name, kind))


def quartic_reference(wavelength, fields):
    """Frequency scaling as the fourth power of the field, rad/s."""
    fields = np.asarray(fields, float)
    return ((ELEMENTARY_CHARGE * fields) ** 4 * wavelength ** 5
            / ((2.0 * math.pi) ** 5 * HBAR ** 2 * ELECTRON_MASS ** 2
               * SPEED_OF_LIGHT ** 5))


def quadratic_reference(wavelength, fields):
    """Frequency scaling as the second power of the field, rad/s."""
    fields = np.asarray(fields, float)
    return ((ELEMENTARY_CHARGE * fields) ** 2 * wavelength
            / (2.0 * math.pi * ELECTRON_MASS ** 2 * SPEED_OF_LIGHT ** 3))


def _wavelength_from_manifest(manifest, path):
    try:
        return float(manifest["config"]["wavelength_m"])
    except (TypeError, KeyError) as exc:
        raise SchemaError("file %s carries no manifest with "
                          "config.wavelength_m; cannot place the "
                          "analytic reference lines" % path) from exc


def _render_evolution(spec, manifest, cols, ax):
    t = cols["t_s"] * 1e15
    ax.plot(t, cols["sy_over_hbar"], label=r"$\langle s_y\rangle/\hbar$",
            lw=0.9)
    ax.plot(t, cols["sz_over_hbar"], label=r"$\langle s_z\rangle/\hbar$",
            lw=0.9)
    ax.axhline(0.5, color="0.7", lw=0.6, ls="--")
    ax.axhline(-0.5, color="0.7", lw=0.6, ls="--")
    ax.set_xlabel(spec.xlabel or "time (fs)")
    ax.set_ylabel(spec.ylabel or r"spin components ($\hbar$)")
    ax.set_ylim(-0.6, 0.6)
    ax.legend(loc="upper right", fontsize=8)


def _render_scaling(spec, manifest, cols, ax):
    fields = cols["peak_field_V_per_m"]
    omega = cols["omega_rad_per_s"]
    wavelength = _wavelength_from_manifest(manifest, spec.input_csv)
    grid = np.geomspace(fields.min(), fields.max(), 64)
    ax.loglog(grid, quartic_reference(wavelength, grid), "-", color="0.4",
              lw=1.0, label=r"quartic reference $\propto\hat{E}^4$")
    ax.loglog(grid, quadratic_reference(wavelength, grid), "--",
              color="0.4", lw=1.0,
              label=r"quadratic reference $\propto\hat{E}^2$")
    theory = (manifest or {}).get("theory", "simulation")
    ax.loglog(fields, omega, "o", ms=5, label="%s runs" % theory)
    ax.set_xlabel(spec.xlabel or r"peak field $\hat{E}$ (V/m)")
    ax.set_ylabel(spec.ylabel or r"$\Omega$ (rad/s)")
    ax.legend(loc="best", fontsize=8)


def _render_ellipticity(spec, manifest, cols, ax):
    eta = cols["ellipticity_rad"]
    ratio = cols["omega_over_circular"]
    grid = np.linspace(0.0, math.pi / 2.0, 128)
    ax.plot(grid, np.sin(grid), "-", color="0.4", lw=1.0,
            label=r"$\sin\eta$")
    ax.plot(eta, ratio, "o", ms=5, label="simulation")
    ax.set_xlabel(spec.xlabel or r"ellipticity $\eta$ (rad)")
    ax.set_ylabel(spec.ylabel or r"$\Omega(\eta)\,/\,\Omega(\pi/2)$")
    ax.set_xlim(0.0, math.pi / 2.0 * 1.05)
    ax.legend(loc="best", fontsize=8)


_RENDERERS = {"evolution": _render_evolution,
              "scaling": _render_scaling,
              "ellipticity": _render_ellipticity}


def render(spec):
    """Render one figure; returns the list of files written."""
    manifest, cols = load_csv(spec.input_csv)
    require_columns(cols, spec.kind, spec.input_csv)
    fig, ax = plt.subplots(figsize=(4.8, 3.4), dpi=200)
    _RENDERERS[spec.kind](spec, manifest, cols, ax)
    if spec.title:
        ax.set_title(spec.title, fontsize=10)
    fig.tight_layout()
    base = spec.output
    for ext in (".png", ".svg"):
        if base.endswith(ext):
            base = base[:-len(ext)]
    written = []
    for ext in (".png", ".svg"):
        fig.savefig(base + ext)
        written.append(base + ext)
    plt.close(fig)
    return written


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="spinbeam-plot",
        description="Render figures from spinbeam CSV outputs "
                    "(PNG and SVG)")
    parser.add_argument("input_csv")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("-o", "--output", required=True,
                        help="output base path (.png/.svg appended)")
    parser.add_argument("--xlabel")
    parser.add_argument("--ylabel")
    parser.add_argument("--title")
    args = parser.parse_args(argv)
    spec = PlotSpec(input_csv=args.input_csv, kind=args.kind,
                    output=args.output, xlabel=args.xlabel,
                    ylabel=args.ylabel, title=args.title)
    try:
        written = render(spec)
    except SchemaError as exc:
        print("schema error: %s" % exc, file=sys.stderr)
        return 2
    for path in written:
        print("wrote %s" % path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
