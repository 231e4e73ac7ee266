#!/usr/bin/env python3
"""Regenerate the shipped sample CSVs with the spinbeam CLI.

Run from this directory (requires the spinbeam package installed):
    python3 regenerate.py
Outputs are deterministic, so reruns reproduce the shipped files
byte-for-byte on the same build.
"""

import json
import math
import pathlib
import subprocess
import sys

HERE = pathlib.Path(__file__).parent

BASE = {
    "wavelength_m": 0.992e-10,
    "peak_field_V_per_m": 6.0e14,
    "ellipticity_rad": math.pi / 2,
    "ramp_cycles": 20,
    "total_cycles": 5500,
    "n_max": 6,
    "theory": "dirac",
}


def cli(*args):
    subprocess.run([sys.executable, "-m", "spinbeam.cli", *args],
                   check=True, cwd=HERE)


def main():
    evo_cfg = HERE / "evolution_config.json"
    evo_cfg.write_text(json.dumps(BASE, indent=2) + "\n")
    cli("simulate", str(evo_cfg), "-o", "evolution.csv")

    sweep_cfg = HERE / "sweep_config.json"
    sweep_cfg.write_text(json.dumps(dict(BASE, total_cycles=100), indent=2)
                         + "\n")
    cli("sweep", str(sweep_cfg), "--axis", "field",
        "--values", "2e14,3e14,4e14,5e14,6e14", "-o", "scaling_dirac.csv")

    pauli_cfg = HERE / "sweep_pauli_config.json"
    pauli_cfg.write_text(json.dumps(dict(BASE, total_cycles=100,
                                         theory="pauli-nonrel"), indent=2)
                         + "\n")
    cli("sweep", str(pauli_cfg), "--axis", "field",
        "--values", "2e14,3e14,4e14,5e14,6e14",
        "-o", "scaling_pauli_nonrel.csv")

    etas = [math.pi / 12, math.pi / 6, math.pi / 4, math.pi / 3,
            5 * math.pi / 12, math.pi / 2]
    cli("sweep", str(sweep_cfg), "--axis", "ellipticity",
        "--values", ",".join("%.17g" % v for v in etas),
        "-o", "ellipticity.csv")


if __name__ == "__main__":
    main()
