"""Frequency extraction, scaling fits, closed-form predictions, bounds.

Turns spin time series from the solvers into precession frequencies,
runs field-strength and ellipticity sweeps with power-law fits, and
evaluates the closed-form frequency formulas, the perturbative validity
conditions, and the experimental feasibility bounds.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import curve_fit

from . import classical, dirac, pauli
from .constants import CODATA2018, SCALE
from .fields import LaserConfig

THEORIES = ("dirac", "pauli-rel", "pauli-nonrel", "classical-full")


class InsufficientSignalError(RuntimeError):
    """Raised when a series accumulates too little precession phase.

    Carries the accumulated phase and the minimum required, so callers
    can size a longer run.
    """

    def __init__(self, accumulated, required):
        self.accumulated = accumulated
        self.required = required
        super().__init__(
            "accumulated precession phase %.3g rad is below the "
            "minimum %.3g rad; run longer" % (accumulated, required))


@dataclass(frozen=True)
class PrecessionResult:
    omega: float          # rad/s, >= 0
    amplitude: float      # J s
    phase: float          # rad, phase offset of the fit
    fit_residual: float   # dimensionless RMS
    method: str           # "phase-slope" | "multi-run-fit"
    theory: str

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("omega must be non-negative")
        if self.method not in ("phase-slope", "multi-run-fit"):
            raise ValueError("unknown method %r" % (self.method,))
        if self.theory not in THEORIES:
            raise ValueError("unknown theory %r" % (self.theory,))


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    prefactor: float      # (rad/s) / (V/m)^exponent
    r_squared: float
    field_points: tuple   # of (E_hat, omega)

    def __post_init__(self):
        if len(self.field_points) < 5:
            raise ValueError("a scaling fit needs at least 5 field points")
        fields = [e for e, _ in self.field_points]
        if max(fields) < 3.0 * min(fields):
            raise ValueError("field points must span at least a factor of 3")


MIN_TOTAL_PHASE = 0.1  # rad


def _cycle_average(times, values, period, t_start, n_cycles):
    """Average values over n_cycles consecutive laser periods."""
    bounds = t_start + period * np.arange(n_cycles + 1)
    idx = np.searchsorted(times, bounds - 1e-9 * period)
    out_t = 0.5 * (bounds[:-1] + bounds[1:])
    out_v = np.array([np.mean(values[idx[m]:idx[m + 1]])
                      for m in range(n_cycles)])
    return out_t, out_v


def extract_frequency_phase_slope(times, sy, sz, period, plateau,
                                  theory="dirac"):
    """Fit the plateau precession phase atan2(<s_y>, <s_z>) to a line.

    times/sy/sz: series in SI units sampled at >= 8 points per laser
    period; period: laser period in s; plateau: (t1, t2) window in s,
    ramps excluded.  Returns a PrecessionResult with omega = |slope|.
    """
    times = np.asarray(times, float)
    sy = np.asarray(sy, float)
    sz = np.asarray(sz, float)
    t1, t2 = plateau
    if t2 <= t1:
        raise ValueError("empty plateau window")
    mask = (times >= t1 - 1e-9 * period) & (times <= t2 + 1e-9 * period)
    t = times[mask]
    n_cycles = int(math.floor((t[-1] - t[0]) / period + 1e-9))
    if n_cycles < 1:
        raise ValueError("plateau shorter than one laser period")
    samples_per_cycle = np.sum((t >= t[0]) & (t < t[0] + period))
    if samples_per_cycle < 8:
        raise ValueError("need at least 8 samples per laser period")
    tc, syc = _cycle_average(t, sy[mask], period, t[0], n_cycles)
    _, szc = _cycle_average(t, sz[mask], period, t[0], n_cycles)
    phase = np.unwrap(np.arctan2(syc, szc))
    total = abs(phase[-1] - phase[0])
    if total < MIN_TOTAL_PHASE:
        raise InsufficientSignalError(total, MIN_TOTAL_PHASE)
    slope, intercept = np.polyfit(tc, phase, 1)
    resid = phase - (slope * tc + intercept)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    amplitude = float(np.mean(np.hypot(syc, szc)))
    return PrecessionResult(omega=abs(float(slope)), amplitude=amplitude,
                            phase=float(intercept), fit_residual=rms,
                            method="phase-slope", theory=theory)


def extract_frequency_multirun(runs, omega_seed, theory="dirac"):
    """Fit end-of-pulse s_z(T) samples to (hbar/2) cos(Omega (T - T0)).

    runs: sequence of (T, s_z(T)) pairs with >= 12 distinct T values
    spanning at least half a precession period of the seed estimate.
    """
    runs = sorted(runs)
    T = np.array([r[0] for r in runs], float)
    szT = np.array([r[1] for r in runs], float)
    if len(np.unique(T)) < 12:
        raise ValueError("need at least 12 distinct interaction times")
    if omega_seed <= 0:
        raise ValueError("omega_seed must be positive")
    if (T[-1] - T[0]) * omega_seed < math.pi:
        raise ValueError("samples must span at least half a precession "
                         "period of the seed estimate")
    h2 = 0.5 * CODATA2018.hbar

    def model(t, omega, t0):
        return h2 * np.cos(omega * (t - t0))

    try:
        popt, pcov = curve_fit(model, T, szT, p0=[omega_seed, 0.0],
                               maxfev=20000)
    except RuntimeError as exc:
        resid = szT - model(T, omega_seed, 0.0)
        raise RuntimeError(
            "cosine fit did not converge (seed residual RMS %.3g)"
            % float(np.sqrt(np.mean(resid ** 2)))) from exc
    omega, t0 = popt
    resid = (szT - model(T, *popt)) / h2
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return PrecessionResult(omega=abs(float(omega)), amplitude=h2,
                            phase=float(-abs(omega) * t0),
                            fit_residual=rms, method="multi-run-fit",
                            theory=theory)


def omega_dirac_formula(cfg):
    """Quartic-in-field precession frequency prediction, rad/s."""
    q = CODATA2018.elementary_charge
    m = CODATA2018.electron_mass
    c = CODATA2018.speed_of_light
    hbar = CODATA2018.hbar
    return ((q * cfg.peak_field) ** 4 * cfg.wavelength ** 5
            / ((2.0 * math.pi) ** 5 * hbar ** 2 * m ** 2 * c ** 5))


def omega_pauli_formula(cfg):
    """Quadratic-in-field wavelength-averaged frequency, rad/s."""
    q = CODATA2018.elementary_charge
    m = CODATA2018.electron_mass
    c = CODATA2018.speed_of_light
    return ((q * cfg.peak_field) ** 2 * cfg.wavelength
            / (2.0 * math.pi * m ** 2 * c ** 3))


@dataclass(frozen=True)
class ValidityReport:
    field_vs_photon_momentum: bool   # |q|E < k^2 hbar c
    field_vs_rest_energy: bool       # |q|E < 2 k m c^2
    ratio_photon_momentum: float
    ratio_rest_energy: float

    @property
    def valid(self):
        return self.field_vs_photon_momentum and self.field_vs_rest_energy


def perturbative_validity(cfg):
    """Check both smallness conditions for the perturbative treatment."""
    q = CODATA2018.elementary_charge
    m = CODATA2018.electron_mass
    c = CODATA2018.speed_of_light
    hbar = CODATA2018.hbar
    k = cfg.wavenumber
    r1 = q * cfg.peak_field / (k * k * hbar * c)
    r2 = q * cfg.peak_field / (2.0 * k * m * c * c)
    return ValidityReport(field_vs_photon_momentum=r1 < 1.0,
                          field_vs_rest_energy=r2 < 1.0,
                          ratio_photon_momentum=r1,
                          ratio_rest_energy=r2)


@dataclass(frozen=True)
class FieldBounds:
    e_min: float      # V/m, below which the precession is undetectable
    e_max: float      # V/m, above which perturbation theory fails
    feasible: bool    # e_min <= e_max

    def intensity_at(self, e_field):
        """I = eps0 c E^2, in W/cm^2."""
        c = CODATA2018.speed_of_light
        return CODATA2018.vacuum_permittivity * c * e_field ** 2 * 1e-4


def experimental_bounds(wavelength, n_cycles):
    """Field-strength window for observing a full spin flip in n cycles."""
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    if n_cycles < 1:
        raise ValueError("n_cycles must be at least 1")
    q = CODATA2018.elementary_charge
    m = CODATA2018.electron_mass
    c = CODATA2018.speed_of_light
    hbar = CODATA2018.hbar
    two_pi = 2.0 * math.pi
    e_min = (two_pi ** 6 * c ** 6 * hbar ** 2 * m ** 2
             / (2.0 * n_cycles * q ** 4 * wavelength ** 6)) ** 0.25
    e_max = two_pi ** 2 * c * hbar / (q * wavelength ** 2)
    return FieldBounds(e_min=e_min, e_max=e_max, feasible=e_min <= e_max)


def coincidence_point(n_cycles):
    """Wavelength and field where the two bounds meet, (lambda, E, I).

    The lower bound scales as lambda^(-3/2) and the upper as
    lambda^(-2); equating them gives a closed-form wavelength.
    """
    q = CODATA2018.elementary_charge
    m = CODATA2018.electron_mass
    c = CODATA2018.speed_of_light
    hbar = CODATA2018.hbar
    two_pi = 2.0 * math.pi
    a = (two_pi ** 6 * c ** 6 * hbar ** 2 * m ** 2
         / (2.0 * n_cycles * q ** 4)) ** 0.25  # e_min = a lam^(-3/2)
    b = two_pi ** 2 * c * hbar / q             # e_max = b lam^(-2)
    lam = (b / a) ** 2
    bounds = experimental_bounds(lam, n_cycles)
    return lam, bounds.e_max, bounds.intensity_at(bounds.e_max)


# --- sweeps -----------------------------------------------------------

# target plateau precession phase when sizing run durations, rad
_PHASE_TARGET = 0.6
_MAX_CYCLES = 40000
_QUANTUM_RAMP_CYCLES = 20

# Classical trapping: the ramp is stretched as 1/E-hat (constant
# instability growth through the turn-on) with a logarithmic correction
# for the quiver amplitude, so every field point is captured into the
# standing-wave well at the same depth.
_CLASSICAL_RAMP_COEFF = 0.40
_CLASSICAL_RAMP_LOG = 0.061
_CLASSICAL_RAMP_REF = 2.0e14  # V/m


def _classical_ramp_cycles(cfg):
    e0 = SCALE.efield_to_internal(cfg.peak_field)
    coeff = (_CLASSICAL_RAMP_COEFF
             - _CLASSICAL_RAMP_LOG * math.log(cfg.peak_field
                                              / _CLASSICAL_RAMP_REF))
    return max(1, int(round(coeff / e0)))


def _predicted_omega(theory, cfg):
    if theory == "dirac":
        return omega_dirac_formula(cfg)
    if theory in ("pauli-rel",):
        return omega_dirac_formula(cfg)
    if theory in ("pauli-nonrel",):
        return omega_pauli_formula(cfg)
    if theory == "classical-full":
        return 0.75 * omega_pauli_formula(cfg)
    raise ValueError("unknown theory %r" % (theory,))


def _plateau_cycles_for(theory, cfg):
    omega = _predicted_omega(theory, cfg)
    if omega <= 0:
        raise InsufficientSignalError(0.0, MIN_TOTAL_PHASE)
    cycles = int(math.ceil(_PHASE_TARGET / (omega * cfg.period)))
    return min(max(cycles, 100), _MAX_CYCLES)


def sweep_config(theory, template, peak_field, ellipticity=None):
    """Size ramp and total duration for one sweep point."""
    eta = template.ellipticity if ellipticity is None else ellipticity
    cfg = replace(template, peak_field=peak_field, ellipticity=eta,
                  ramp_cycles=1, total_cycles=3)
    if theory == "classical-full":
        ramp = _classical_ramp_cycles(cfg)
    else:
        ramp = _QUANTUM_RAMP_CYCLES
    plateau = _plateau_cycles_for(theory, cfg)
    return replace(cfg, ramp_cycles=ramp, total_cycles=2 * ramp + plateau)


def run_point(theory, cfg, n_max=8, tol=1e-10):
    """Run one solver and extract the plateau precession frequency."""
    if theory == "dirac":
        spec = dirac.BasisSpec(n_max=n_max, k=cfg.wavenumber)
        series = dirac.propagate(dirac.DiracState.ground(spec), cfg, spec,
                                 tol=tol)
        times, sy, sz = series.times, series.sy, series.sz
    elif theory in ("pauli-rel", "pauli-nonrel"):
        toggles = pauli.FULL if theory == "pauli-rel" else pauli.SIGMA_B_ONLY
        series = pauli.propagate_pauli(pauli.PauliState.ground(n_max), cfg,
                                       toggles=toggles, n_max=n_max, tol=tol)
        times, sy, sz = series.times, series.sy, series.sz
    else:
        series = classical.propagate_full_classical(
            classical.ClassicalState.at_rest(), cfg, tol=tol)
        times, sy, sz = series.times, series.sy, series.sz
    plateau = (cfg.ramp_time, cfg.total_time - cfg.ramp_time)
    return extract_frequency_phase_slope(times, sy, sz, cfg.period, plateau,
                                         theory=theory)


def _sweep_worker(job):
    theory, cfg, n_max, tol = job
    return run_point(theory, cfg, n_max=n_max, tol=tol)


def _max_workers():
    raw = os.environ.get("SPINBEAM_MAX_WORKERS", "1")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError("SPINBEAM_MAX_WORKERS must be an integer") from exc
    return max(1, value)


class SweepError(RuntimeError):
    """A sweep point failed; carries the points completed so far."""

    def __init__(self, message, partial):
        self.partial = partial
        super().__init__(message)


def _run_points(jobs, labels):
    """Run sweep jobs, preserving completed points if one fails."""
    workers = _max_workers()
    results = []
    if workers == 1 or len(jobs) == 1:
        for label, job in zip(labels, jobs):
            try:
                results.append(_sweep_worker(job))
            except InsufficientSignalError as exc:
                partial = tuple((lab, r.omega)
                                for lab, r in zip(labels, results))
                raise SweepError("sweep aborted at %r: %s" % (label, exc),
                                 partial) from exc
        return results
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        futures = [pool.submit(_sweep_worker, job) for job in jobs]
        for label, fut in zip(labels, futures):
            try:
                results.append(fut.result())
            except InsufficientSignalError as exc:
                partial = tuple((lab, r.omega)
                                for lab, r in zip(labels, results))
                raise SweepError("sweep aborted at %r: %s" % (label, exc),
                                 partial) from exc
    return results


def field_sweep(theory, template, field_values, n_max=8, tol=1e-10):
    """Run the chosen solver across field strengths; fit the power law."""
    if theory not in THEORIES:
        raise ValueError("unknown theory %r" % (theory,))
    field_values = sorted(float(e) for e in field_values)
    jobs = []
    for e_hat in field_values:
        probe = replace(template, peak_field=e_hat, ramp_cycles=1,
                        total_cycles=3)
        if not perturbative_validity(probe).valid:
            raise ValueError("field %.3e V/m violates the perturbative "
                             "validity conditions" % e_hat)
        jobs.append((theory, sweep_config(theory, template, e_hat),
                     n_max, tol))
    results = _run_points(jobs, field_values)
    points = [(e, r.omega) for e, r in zip(field_values, results)]
    log_e = np.log(field_values)
    log_o = np.log([o for _, o in points])
    exponent, log_pref = np.polyfit(log_e, log_o, 1)
    pred = exponent * log_e + log_pref
    ss_res = float(np.sum((log_o - pred) ** 2))
    ss_tot = float(np.sum((log_o - np.mean(log_o)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(exponent=float(exponent),
                      prefactor=float(np.exp(log_pref)),
                      r_squared=r_squared, field_points=tuple(points))


def ellipticity_sweep(template, eta_values, n_max=8, tol=1e-10):
    """Frequencies across ellipticities, normalized to circular.

    Returns a list of (eta, omega_ratio, fit_residual); eta values must
    include pi/2, which provides the normalization.
    """
    eta_values = sorted(float(v) for v in eta_values)
    if not any(abs(v - math.pi / 2.0) < 1e-12 for v in eta_values):
        raise ValueError("eta values must include pi/2 for normalization")
    jobs = []
    for eta in eta_values:
        base = sweep_config("dirac", template, template.peak_field)
        # precession slows as sin(eta); stretch the plateau to keep the
        # accumulated phase extractable
        scale = 1.0 / max(math.sin(eta), 0.05)
        plateau = min(int(round((base.total_cycles - 2 * base.ramp_cycles)
                                * scale)), _MAX_CYCLES)
        cfg = replace(base, ellipticity=eta,
                      total_cycles=2 * base.ramp_cycles + plateau)
        jobs.append(("dirac", cfg, n_max, tol))
    results = _run_points(jobs, eta_values)
    circular = next(r for eta, r in zip(eta_values, results)
                    if abs(eta - math.pi / 2.0) < 1e-12)
    return [(eta, r.omega / circular.omega, r.fit_residual)
            for eta, r in zip(eta_values, results)]
