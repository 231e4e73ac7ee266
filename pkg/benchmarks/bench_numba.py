#!/usr/bin/env python3
"""Compare the jitted and pure-numpy propagation paths.

Runs the same relativistic propagation in two subprocesses, one with
SPINBEAM_DISABLE_NUMBA=1, and reports wall time and the maximum
difference between the two spin series.

Usage: python3 benchmarks/bench_numba.py [--cycles N] [--n-max M]
"""

import argparse
import json
import os
import subprocess
import sys
import tempfile

WORKLOAD = r"""
import json, math, sys, time
from spinbeam import dirac
from spinbeam.fields import LaserConfig

cycles, n_max = int(sys.argv[1]), int(sys.argv[2])
cfg = LaserConfig(wavelength=0.992e-10, peak_field=5.53e14,
                  ellipticity=math.pi / 2, ramp_cycles=max(1, cycles // 6),
                  total_cycles=cycles)
spec = dirac.BasisSpec(n_max=n_max, k=cfg.wavenumber)
state = dirac.DiracState.ground(spec)

t0 = time.perf_counter()
dirac.propagate(state, cfg, spec, tol=1e-10)   # includes jit compilation
warm = time.perf_counter() - t0

t0 = time.perf_counter()
series = dirac.propagate(state, cfg, spec, tol=1e-10)
hot = time.perf_counter() - t0

print(json.dumps({"first_s": warm, "repeat_s": hot,
                  "sy": list(series.sy[-5:]), "sz": list(series.sz[-5:])}))
"""


def run(disable_numba, cycles, n_max):
    env = dict(os.environ)
    env["SPINBEAM_DISABLE_NUMBA"] = "1" if disable_numba else "0"
    with tempfile.NamedTemporaryFile("w", suffix=".py", delete=False) as fh:
        fh.write(WORKLOAD)
        path = fh.name
    try:
        out = subprocess.run(
            [sys.executable, path, str(cycles), str(n_max)],
            env=env, capture_output=True, text=True, check=True)
    finally:
        os.unlink(path)
    return json.loads(out.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    # the pure-numpy path runs the same adaptive stepper in interpreted
    # loops and is orders of magnitude slower, so the default workload
    # is deliberately tiny
    parser.add_argument("--cycles", type=int, default=6)
    parser.add_argument("--n-max", type=int, default=2)
    args = parser.parse_args()

    print("workload: %d cycles, n_max=%d, tol=1e-10" % (args.cycles,
                                                        args.n_max))
    jit = run(False, args.cycles, args.n_max)
    plain = run(True, args.cycles, args.n_max)

    diff = max(abs(a - b) for a, b in
               zip(jit["sy"] + jit["sz"], plain["sy"] + plain["sz"]))
    print("jitted:     first %7.2f s   repeat %7.2f s"
          % (jit["first_s"], jit["repeat_s"]))
    print("pure numpy: first %7.2f s   repeat %7.2f s"
          % (plain["first_s"], plain["repeat_s"]))
    print("speedup (repeat): %.1fx" % (plain["repeat_s"] / jit["repeat_s"]))
    print("max |spin difference| between paths: %.3e J s" % diff)


if __name__ == "__main__":
    main()
