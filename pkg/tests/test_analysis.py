"""Frequency extraction, analytic formulas, bounds, and sweep plumbing."""

import math

import numpy as np
import pytest

from spinbeam import analysis
from spinbeam.constants import CODATA2018, SCALE
from spinbeam.fields import LaserConfig

HBAR = CODATA2018.hbar
LAMBDA = 0.992e-10


def make_cfg(peak_field=1.38e14, eta=math.pi / 2, ramp_cycles=20,
             total_cycles=200):
    return LaserConfig(wavelength=LAMBDA, peak_field=peak_field,
                       ellipticity=eta, ramp_cycles=ramp_cycles,
                       total_cycles=total_cycles)


class TestFormulas:
    def test_quartic_formula_matches_internal_units_recomputation(self):
        # independent route: natural units (hbar = c = m = 1) where the
        # frequency is e0^4 / k^5, converted back through the time scale
        cfg = make_cfg(peak_field=3.7e14)
        e0 = cfg.peak_field / SCALE.efield_V_per_m
        k = cfg.wavenumber * SCALE.length_m
        expected = (e0 ** 4 / k ** 5) / SCALE.time_s
        assert analysis.omega_dirac_formula(cfg) == pytest.approx(
            expected, rel=1e-12)

    def test_quadratic_formula_matches_internal_units_recomputation(self):
        cfg = make_cfg(peak_field=3.7e14)
        e0 = cfg.peak_field / SCALE.efield_V_per_m
        k = cfg.wavenumber * SCALE.length_m
        expected = (e0 ** 2 / k) / SCALE.time_s
        assert analysis.omega_pauli_formula(cfg) == pytest.approx(
            expected, rel=1e-12)

    def test_quartic_homogeneity_in_field(self):
        cfg = make_cfg(peak_field=2.0e14)
        scaled = make_cfg(peak_field=6.0e14)
        assert analysis.omega_dirac_formula(scaled) == pytest.approx(
            81.0 * analysis.omega_dirac_formula(cfg), rel=1e-13)

    def test_quadratic_homogeneity_in_field(self):
        cfg = make_cfg(peak_field=2.0e14)
        scaled = make_cfg(peak_field=6.0e14)
        assert analysis.omega_pauli_formula(scaled) == pytest.approx(
            9.0 * analysis.omega_pauli_formula(cfg), rel=1e-13)

    def test_frozen_values(self):
        cfg = make_cfg(peak_field=5.53e14)
        assert analysis.omega_dirac_formula(cfg) == pytest.approx(
            2.705000e15, rel=1e-4)
        assert analysis.omega_pauli_formula(cfg) == pytest.approx(
            5.543228e15, rel=1e-4)


class TestValidity:
    def test_ratios(self):
        cfg = make_cfg(peak_field=1.38e14)
        rep = analysis.perturbative_validity(cfg)
        assert rep.ratio_photon_momentum == pytest.approx(0.17432, rel=1e-3)
        assert rep.ratio_rest_energy == pytest.approx(2.1319e-3, rel=1e-3)
        assert rep.valid

    def test_invalid_beyond_photon_momentum_bound(self):
        cfg = make_cfg(peak_field=9.0e14)
        rep = analysis.perturbative_validity(cfg)
        assert not rep.field_vs_photon_momentum
        assert not rep.valid


class TestBounds:
    def test_frozen_window(self):
        b = analysis.experimental_bounds(0.24e-9, 5000)
        assert b.e_min == pytest.approx(1.345105e14, rel=1e-5)
        assert b.e_max == pytest.approx(1.352458e14, rel=1e-5)
        assert b.feasible

    def test_minimum_field_from_flip_condition(self):
        # independent route: the quartic frequency must reach a half-turn
        # of the spin within n laser periods
        lam, n = 0.3e-9, 2000
        b = analysis.experimental_bounds(lam, n)
        cfg = LaserConfig(wavelength=lam, peak_field=b.e_min,
                          ellipticity=math.pi / 2, ramp_cycles=0,
                          total_cycles=n)
        accumulated = analysis.omega_dirac_formula(cfg) * cfg.total_time
        assert accumulated == pytest.approx(math.pi, rel=1e-10)

    def test_maximum_field_is_photon_momentum_bound(self):
        lam = 0.3e-9
        b = analysis.experimental_bounds(lam, 2000)
        cfg = LaserConfig(wavelength=lam, peak_field=b.e_max,
                          ellipticity=math.pi / 2, ramp_cycles=0,
                          total_cycles=10)
        rep = analysis.perturbative_validity(cfg)
        assert rep.ratio_photon_momentum == pytest.approx(1.0, rel=1e-12)

    def test_scaling_with_wavelength(self):
        b1 = analysis.experimental_bounds(0.2e-9, 5000)
        b2 = analysis.experimental_bounds(0.4e-9, 5000)
        assert b1.e_min / b2.e_min == pytest.approx(2 ** 1.5, rel=1e-12)
        assert b1.e_max / b2.e_max == pytest.approx(4.0, rel=1e-12)

    def test_infeasible_for_short_pulses_at_long_wavelength(self):
        b = analysis.experimental_bounds(1.0e-9, 10)
        assert not b.feasible

    def test_validation(self):
        with pytest.raises(ValueError):
            analysis.experimental_bounds(-1.0, 100)
        with pytest.raises(ValueError):
            analysis.experimental_bounds(1e-10, 0)

    def test_coincidence_point(self):
        lam, e_hat, intensity = analysis.coincidence_point(5000)
        assert lam == pytest.approx(2.426310e-10, rel=1e-5)
        assert e_hat == pytest.approx(1.323285e14, rel=1e-5)
        assert intensity == pytest.approx(4.648111e21, rel=1e-5)
        # at the coincidence wavelength the two bounds agree
        b = analysis.experimental_bounds(lam, 5000)
        assert b.e_min == pytest.approx(b.e_max, rel=1e-10)

    def test_intensity_formula(self):
        b = analysis.experimental_bounds(0.24e-9, 5000)
        e = 2.0e14
        expected = (CODATA2018.vacuum_permittivity
                    * CODATA2018.speed_of_light * e * e) * 1e-4
        assert b.intensity_at(e) == pytest.approx(expected, rel=1e-14)


def synthetic_series(omega, cfg, samples_per_cycle=16):
    n = int(cfg.total_cycles * samples_per_cycle)
    t = np.linspace(0.0, cfg.total_time, n + 1)
    sy = 0.5 * HBAR * np.sin(omega * t)
    sz = 0.5 * HBAR * np.cos(omega * t)
    return t, sy, sz


class TestPhaseSlopeExtraction:
    def test_recovers_synthetic_frequency(self):
        cfg = make_cfg(total_cycles=400, ramp_cycles=0)
        omega = 2.0 / cfg.total_time  # 2 rad over the pulse
        t, sy, sz = synthetic_series(omega, cfg)
        res = analysis.extract_frequency_phase_slope(
            t, sy, sz, cfg.period, (0.0, cfg.total_time))
        assert res.omega == pytest.approx(omega, rel=1e-8)
        assert res.method == "phase-slope"
        assert res.fit_residual < 1e-8

    def test_sign_insensitive(self):
        cfg = make_cfg(total_cycles=400, ramp_cycles=0)
        omega = 2.0 / cfg.total_time
        t, sy, sz = synthetic_series(-omega, cfg)
        res = analysis.extract_frequency_phase_slope(
            t, sy, sz, cfg.period, (0.0, cfg.total_time))
        assert res.omega == pytest.approx(omega, rel=1e-8)

    def test_insufficient_signal(self):
        cfg = make_cfg(total_cycles=400, ramp_cycles=0)
        omega = 0.01 / cfg.total_time
        t, sy, sz = synthetic_series(omega, cfg)
        with pytest.raises(analysis.InsufficientSignalError) as err:
            analysis.extract_frequency_phase_slope(
                t, sy, sz, cfg.period, (0.0, cfg.total_time))
        assert err.value.accumulated < err.value.required
        assert err.value.required == analysis.MIN_TOTAL_PHASE

    def test_requires_dense_sampling(self):
        cfg = make_cfg(total_cycles=400, ramp_cycles=0)
        omega = 2.0 / cfg.total_time
        t, sy, sz = synthetic_series(omega, cfg, samples_per_cycle=4)
        with pytest.raises(ValueError, match="8 samples"):
            analysis.extract_frequency_phase_slope(
                t, sy, sz, cfg.period, (0.0, cfg.total_time))

    def test_rejects_empty_plateau(self):
        cfg = make_cfg(total_cycles=400, ramp_cycles=0)
        t, sy, sz = synthetic_series(1.0 / cfg.total_time, cfg)
        with pytest.raises(ValueError):
            analysis.extract_frequency_phase_slope(
                t, sy, sz, cfg.period, (cfg.total_time, 0.0))

    def test_rejects_subperiod_plateau(self):
        cfg = make_cfg(total_cycles=400, ramp_cycles=0)
        t, sy, sz = synthetic_series(1.0 / cfg.total_time, cfg)
        with pytest.raises(ValueError):
            analysis.extract_frequency_phase_slope(
                t, sy, sz, cfg.period, (0.0, 0.5 * cfg.period))


class TestMultirunExtraction:
    def test_recovers_synthetic_frequency(self):
        omega = 3.7e12
        T = np.linspace(0.0, 2.5 * math.pi / omega, 24)
        runs = [(t, 0.5 * HBAR * math.cos(omega * t)) for t in T]
        res = analysis.extract_frequency_multirun(runs, 0.8 * omega)
        assert res.omega == pytest.approx(omega, rel=1e-8)
        assert res.method == "multi-run-fit"
        assert res.fit_residual < 1e-10

    def test_too_few_runs(self):
        omega = 1.0e12
        runs = [(t, 0.5 * HBAR * math.cos(omega * t))
                for t in np.linspace(0, 4 / omega, 8)]
        with pytest.raises(ValueError, match="12 distinct"):
            analysis.extract_frequency_multirun(runs, omega)

    def test_span_too_short(self):
        omega = 1.0e12
        runs = [(t, 0.5 * HBAR * math.cos(omega * t))
                for t in np.linspace(0, 1.0 / omega, 16)]
        with pytest.raises(ValueError, match="span"):
            analysis.extract_frequency_multirun(runs, omega)

    def test_bad_seed(self):
        runs = [(float(i), 0.0) for i in range(16)]
        with pytest.raises(ValueError, match="seed"):
            analysis.extract_frequency_multirun(runs, 0.0)


class TestResultInvariants:
    def test_negative_omega_rejected(self):
        with pytest.raises(ValueError):
            analysis.PrecessionResult(omega=-1.0, amplitude=1.0, phase=0.0,
                                      fit_residual=0.0, method="phase-slope",
                                      theory="dirac")

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            analysis.PrecessionResult(omega=1.0, amplitude=1.0, phase=0.0,
                                      fit_residual=0.0, method="guess",
                                      theory="dirac")

    def test_unknown_theory_rejected(self):
        with pytest.raises(ValueError):
            analysis.PrecessionResult(omega=1.0, amplitude=1.0, phase=0.0,
                                      fit_residual=0.0, method="phase-slope",
                                      theory="bogus")

    def test_scaling_fit_needs_five_points(self):
        with pytest.raises(ValueError, match="5 field points"):
            analysis.ScalingFit(exponent=4.0, prefactor=1.0, r_squared=1.0,
                                field_points=((1e14, 1.0), (2e14, 16.0)))

    def test_scaling_fit_needs_field_span(self):
        points = tuple((e, e ** 4) for e in np.linspace(1e14, 1.5e14, 6))
        with pytest.raises(ValueError, match="factor of 3"):
            analysis.ScalingFit(exponent=4.0, prefactor=1.0, r_squared=1.0,
                                field_points=points)


class TestSweepPlumbing:
    def test_sweep_config_sizes_plateau_for_target_phase(self):
        template = make_cfg()
        cfg = analysis.sweep_config("dirac", template, 4.0e14)
        assert cfg.peak_field == 4.0e14
        plateau_cycles = cfg.total_cycles - 2 * cfg.ramp_cycles
        phase = (analysis.omega_dirac_formula(cfg) * plateau_cycles
                 * cfg.period)
        assert phase >= 0.99 * analysis._PHASE_TARGET or \
            plateau_cycles == analysis._MAX_CYCLES
        assert cfg.ramp_cycles == analysis._QUANTUM_RAMP_CYCLES

    def test_sweep_config_classical_ramp_shrinks_with_field(self):
        template = make_cfg()
        r_low = analysis.sweep_config("classical-full", template,
                                      2.0e14).ramp_cycles
        r_high = analysis.sweep_config("classical-full", template,
                                       6.0e14).ramp_cycles
        assert r_low > r_high >= 1

    def test_field_sweep_rejects_invalid_field(self):
        template = make_cfg()
        with pytest.raises(ValueError, match="validity"):
            analysis.field_sweep("dirac", template,
                                 [2e14, 3e14, 4e14, 5e14, 9e14])

    def test_field_sweep_rejects_unknown_theory(self):
        with pytest.raises(ValueError, match="theory"):
            analysis.field_sweep("wkb", make_cfg(), [2e14] * 5)

    def test_ellipticity_sweep_requires_circular_reference(self):
        with pytest.raises(ValueError, match="pi/2"):
            analysis.ellipticity_sweep(make_cfg(), [0.3, 0.6, 0.9])

    def test_max_workers_env(self, monkeypatch):
        monkeypatch.setenv("SPINBEAM_MAX_WORKERS", "4")
        assert analysis._max_workers() == 4
        monkeypatch.setenv("SPINBEAM_MAX_WORKERS", "0")
        assert analysis._max_workers() == 1
        monkeypatch.setenv("SPINBEAM_MAX_WORKERS", "two")
        with pytest.raises(ValueError):
            analysis._max_workers()

    def test_sweep_error_preserves_partial(self, monkeypatch):
        # a local fake worker cannot cross a process boundary
        monkeypatch.setenv("SPINBEAM_MAX_WORKERS", "1")
        calls = {"n": 0}

        def fake_worker(job):
            calls["n"] += 1
            if calls["n"] == 3:
                raise analysis.InsufficientSignalError(0.01, 0.1)
            return analysis.PrecessionResult(
                omega=float(calls["n"]), amplitude=1.0, phase=0.0,
                fit_residual=0.0, method="phase-slope", theory="dirac")

        monkeypatch.setattr(analysis, "_sweep_worker", fake_worker)
        labels = [1e14, 2e14, 3e14, 4e14]
        with pytest.raises(analysis.SweepError) as err:
            analysis._run_points([None] * 4, labels)
        assert err.value.partial == ((1e14, 1.0), (2e14, 2.0))

    def test_run_point_classical_smoke(self):
        cfg = analysis.sweep_config("classical-full", make_cfg(), 4.0e14)
        res = analysis.run_point("classical-full", cfg, tol=1e-9)
        ratio = res.omega / analysis.omega_pauli_formula(cfg)
        assert 0.3 < ratio < 1.0

    def test_run_point_pauli_nonrel_matches_formula(self):
        cfg = analysis.sweep_config("pauli-nonrel", make_cfg(), 3.0e14)
        res = analysis.run_point("pauli-nonrel", cfg, n_max=6)
        assert res.omega == pytest.approx(
            analysis.omega_pauli_formula(cfg), rel=1e-3)
