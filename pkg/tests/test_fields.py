"""Laser configuration, window function, and combined fields."""

import math

import numpy as np
import pytest

from spinbeam.constants import CODATA2018
from spinbeam.fields import (LaserConfig, beam_fields, combined_electric,
                             combined_magnetic, combined_potential,
                             photon_spin_density, window, window_derivative)

LAMBDA = 0.992e-10
ETA = math.pi / 2


def make_cfg(**kw):
    base = dict(wavelength=LAMBDA, peak_field=1.38e14, ellipticity=ETA,
                ramp_cycles=20, total_cycles=100)
    base.update(kw)
    return LaserConfig(**base)


class TestLaserConfig:
    def test_derived_quantities(self):
        cfg = make_cfg()
        c = CODATA2018.speed_of_light
        assert cfg.wavenumber == pytest.approx(2 * math.pi / LAMBDA)
        assert cfg.angular_frequency == pytest.approx(cfg.wavenumber * c)
        assert cfg.period == pytest.approx(LAMBDA / c)
        assert cfg.total_time == pytest.approx(100 * cfg.period)
        assert cfg.ramp_time == pytest.approx(20 * cfg.period)

    def test_validation(self):
        with pytest.raises(ValueError):
            make_cfg(wavelength=-1.0)
        with pytest.raises(ValueError):
            make_cfg(peak_field=-1.0)
        with pytest.raises(ValueError):
            make_cfg(ellipticity=-0.1)
        with pytest.raises(ValueError):
            make_cfg(ellipticity=math.pi / 2 + 0.1)
        with pytest.raises(ValueError):
            # ramps would not fit into the pulse
            make_cfg(ramp_cycles=60, total_cycles=100)


class TestWindow:
    def test_plateau_and_endpoints(self):
        cfg = make_cfg()
        assert window(0.0, cfg) == 0.0
        assert window(cfg.total_time, cfg) == pytest.approx(0.0, abs=1e-30)
        assert window(0.5 * cfg.total_time, cfg) == 1.0
        assert window(cfg.ramp_time, cfg) == pytest.approx(1.0)

    def test_ramp_shape(self):
        cfg = make_cfg()
        t = 0.37 * cfg.ramp_time
        expected = math.sin(math.pi * t / (2 * cfg.ramp_time)) ** 2
        assert window(t, cfg) == pytest.approx(expected, rel=1e-14)

    def test_smooth_junctions(self):
        # continuous with continuous derivative where ramp meets plateau
        cfg = make_cfg()
        eps = 1e-6 * cfg.period
        # first derivative approaches zero from both sides; the jump is
        # bounded by the ramp curvature times the probe offset
        curv = math.pi ** 2 / (2 * cfg.ramp_time ** 2)
        for tj in (cfg.ramp_time, cfg.total_time - cfg.ramp_time):
            assert window(tj - eps, cfg) == pytest.approx(
                window(tj + eps, cfg), abs=1e-10)
            jump = abs(window_derivative(tj - eps, cfg)
                       - window_derivative(tj + eps, cfg))
            assert jump <= 5 * curv * eps

    def test_derivative_matches_finite_difference(self):
        cfg = make_cfg()
        rng = np.random.default_rng(7)
        h = 1e-7 * cfg.ramp_time
        for t in rng.uniform(h, cfg.ramp_time - h, 25):
            fd = (window(t + h, cfg) - window(t - h, cfg)) / (2 * h)
            assert window_derivative(t, cfg) == pytest.approx(fd, rel=1e-5)

    def test_out_of_range_time_rejected(self):
        cfg = make_cfg()
        with pytest.raises(ValueError):
            window(-1e-20, cfg)
        with pytest.raises(ValueError):
            window(cfg.total_time * 1.001, cfg)


class TestCombinedFields:
    def test_superposition_of_beams(self):
        cfg = make_cfg()
        rng = np.random.default_rng(3)
        for _ in range(10):
            r = rng.uniform(-LAMBDA, LAMBDA, 3)
            t = rng.uniform(0.3, 0.7) * cfg.total_time
            _, _, a1 = beam_fields(1, r, t, cfg)
            _, _, a2 = beam_fields(2, r, t, cfg)
            total = combined_potential(r, t, cfg, windowed=False)
            np.testing.assert_allclose(a1 + a2, total, rtol=1e-10,
                                       atol=1e-22)

    def test_standing_wave_structure(self):
        # the combined potential vanishes where cos kx = 0 at all times
        cfg = make_cfg()
        x_node = LAMBDA / 4
        for frac in (0.3, 0.45, 0.6):
            a = combined_potential(np.array([x_node, 0, 0]),
                                   frac * cfg.total_time, cfg)
            np.testing.assert_allclose(a, 0.0, atol=1e-20)

    def test_potential_is_transverse(self):
        cfg = make_cfg()
        rng = np.random.default_rng(11)
        for _ in range(10):
            r = rng.uniform(-LAMBDA, LAMBDA, 3)
            t = rng.uniform(0, 1) * cfg.total_time
            assert combined_potential(r, t, cfg)[0] == 0.0

    def test_electric_field_is_time_derivative(self):
        cfg = make_cfg()
        rng = np.random.default_rng(5)
        h = 1e-9 * cfg.period
        for _ in range(10):
            r = rng.uniform(-LAMBDA, LAMBDA, 3)
            t = rng.uniform(0.1, 0.9) * cfg.total_time
            fd = -(combined_potential(r, t + h, cfg)
                   - combined_potential(r, t - h, cfg)) / (2 * h)
            np.testing.assert_allclose(combined_electric(r, t, cfg), fd,
                                       rtol=1e-5, atol=1e-3)

    def test_magnetic_field_is_curl(self):
        cfg = make_cfg()
        rng = np.random.default_rng(9)
        h = 1e-9 * LAMBDA
        for _ in range(10):
            r = rng.uniform(-LAMBDA, LAMBDA, 3)
            t = rng.uniform(0.3, 0.7) * cfg.total_time
            dx = np.array([h, 0, 0])
            da = (combined_potential(r + dx, t, cfg)
                  - combined_potential(r - dx, t, cfg)) / (2 * h)
            curl = np.array([0.0, -da[2], da[1]])
            np.testing.assert_allclose(combined_magnetic(r, t, cfg), curl,
                                       rtol=1e-5, atol=1e-7)

    def test_peak_amplitude(self):
        # standing-wave antinode reaches twice the per-beam amplitude
        cfg = make_cfg(ramp_cycles=1, total_cycles=1000)
        ts = np.linspace(0.4, 0.6, 2001) * cfg.total_time
        e_max = max(np.linalg.norm(combined_electric(np.zeros(3), t, cfg))
                    for t in ts)
        assert e_max == pytest.approx(2 * cfg.peak_field, rel=1e-4)


class TestPhotonSpinDensity:
    def test_per_beam_value(self):
        cfg = make_cfg()
        eps0 = CODATA2018.vacuum_permittivity
        c = CODATA2018.speed_of_light
        expected = (eps0 * cfg.peak_field ** 2 * LAMBDA
                    * math.sin(ETA) / (2 * math.pi * c))
        got = photon_spin_density("per-beam", np.zeros(3), 0.0, cfg)
        assert got[0] == pytest.approx(expected, rel=1e-12)

    def test_total_is_twice_per_beam(self):
        cfg = make_cfg()
        per = photon_spin_density("per-beam", np.zeros(3), 0.0, cfg)
        tot = photon_spin_density("total", np.zeros(3), 0.0, cfg)
        np.testing.assert_allclose(tot, 2 * per, rtol=1e-14)

    def test_combined_field_averages_to_total(self):
        # cos^2 kx modulation: 4x per-beam at the antinode, average 2x
        cfg = make_cfg()
        xs = np.linspace(0, LAMBDA, 512, endpoint=False)
        vals = np.array([photon_spin_density(
            "combined-field", np.array([x, 0, 0]), 0.0, cfg)[0]
            for x in xs])
        tot = photon_spin_density("total", np.zeros(3), 0.0, cfg)[0]
        assert np.mean(vals) == pytest.approx(tot, rel=1e-12)
        assert vals.max() == pytest.approx(2 * tot, rel=1e-9)

    def test_linear_polarization_carries_none(self):
        cfg = make_cfg(ellipticity=0.0)
        got = photon_spin_density("per-beam", np.zeros(3), 0.0, cfg)
        np.testing.assert_allclose(got, 0.0, atol=1e-30)
