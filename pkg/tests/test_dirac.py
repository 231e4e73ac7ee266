"""Four-component momentum-space solver: basis, couplings, propagation."""

import math

import numpy as np
import pytest

from spinbeam import dirac
from spinbeam.constants import CODATA2018, SCALE
from spinbeam.fields import LaserConfig

LAMBDA = 0.992e-10
K_INT = 2.0 * math.pi / LAMBDA * SCALE.length_m


def make_cfg(peak_field=1.38e14, ramp_cycles=2, total_cycles=10, **kw):
    base = dict(wavelength=LAMBDA, peak_field=peak_field,
                ellipticity=math.pi / 2, ramp_cycles=ramp_cycles,
                total_cycles=total_cycles)
    base.update(kw)
    return LaserConfig(**base)


def make_spec(n_max=2):
    return dirac.BasisSpec(n_max=n_max, k=2.0 * math.pi / LAMBDA)


class TestBasis:
    def test_mode_energies(self):
        assert dirac.mode_energy(0, K_INT) == 1.0
        # nonrelativistic expansion: E ~ 1 + (nk)^2/2 for nk << 1
        e1 = dirac.mode_energy(1, K_INT)
        assert e1 == pytest.approx(1.0 + K_INT ** 2 / 2, rel=1e-7)
        assert dirac.mode_energy(-3, K_INT) == dirac.mode_energy(3, K_INT)

    def test_indexing(self):
        spec = make_spec(2)
        assert spec.dim == 20
        seen = {spec.index(n, g) for n in spec.modes for g in dirac.GAMMAS}
        assert seen == set(range(20))

    def test_bispinors_orthonormal(self):
        spec = make_spec(3)
        bis = dirac.build_bispinors(spec)
        for n in spec.modes:
            B = np.column_stack([bis[(n, g)] for g in dirac.GAMMAS])
            np.testing.assert_allclose(B.conj().T @ B, np.eye(4),
                                       atol=1e-14)

    def test_bispinors_diagonalize_free_hamiltonian(self):
        # H0 = alpha.p + beta with eigenvalues +-E_n, two-fold each
        spec = make_spec(3)
        bis = dirac.build_bispinors(spec)
        for n in (-3, -1, 0, 2):
            p = n * K_INT
            h0 = p * dirac.ALPHA_X + dirac.BETA
            e_n = dirac.mode_energy(n, K_INT)
            for g, sign in zip(dirac.GAMMAS, (1, 1, -1, -1)):
                u = bis[(n, g)]
                np.testing.assert_allclose(h0 @ u, sign * e_n * u,
                                           atol=1e-14)


class TestCouplings:
    def test_only_neighbor_modes_couple(self):
        spec = make_spec(3)
        cfg = make_cfg()
        t = 0.5 * cfg.total_time
        H = dirac.assemble_interaction(t, cfg, spec)
        for n in spec.modes:
            for m in spec.modes:
                block = H[4 * (n + 3):4 * (n + 4), 4 * (m + 3):4 * (m + 4)]
                if abs(n - m) != 1:
                    np.testing.assert_allclose(block, 0.0, atol=1e-40)

    def test_interaction_is_hermitian(self):
        spec = make_spec(2)
        cfg = make_cfg(ellipticity=0.73)
        for frac in (0.1, 0.37, 0.5, 0.93):
            H = dirac.assemble_interaction(frac * cfg.total_time, cfg, spec)
            np.testing.assert_allclose(H, H.conj().T, atol=1e-25)

    def test_interaction_scale(self):
        # coupling magnitude is w(t) |q| E-hat / k in SI energy units
        spec = make_spec(2)
        cfg = make_cfg(ramp_cycles=1, total_cycles=8)
        scale = (CODATA2018.elementary_charge * cfg.peak_field
                 / cfg.wavenumber)
        ts = np.linspace(0.2, 0.8, 50) * cfg.total_time
        peak = max(np.abs(dirac.assemble_interaction(t, cfg, spec)).max()
                   for t in ts)
        assert peak <= 2.0 * scale * 1.0000001
        assert peak >= 0.5 * scale

    def test_model_matches_dense_assembly(self):
        spec = make_spec(2)
        cfg = make_cfg(ellipticity=0.9)
        model = dirac.build_model(cfg, spec.n_max)
        e_scale = SCALE.energy_J
        for frac in (0.15, 0.5, 0.77):
            t_int = frac * cfg.total_time / SCALE.time_s
            dense = model.hamiltonian(t_int)
            np.fill_diagonal(dense, 0.0)  # drop the free part
            si = dirac.assemble_interaction(frac * cfg.total_time, cfg, spec)
            np.testing.assert_allclose(dense * e_scale, si, rtol=1e-10,
                                       atol=1e-30)


class TestSpinObservables:
    def test_ground_state_is_spin_up(self):
        spec = make_spec(2)
        state = dirac.DiracState.ground(spec)
        hbar = CODATA2018.hbar
        assert dirac.spin_z(state) == pytest.approx(hbar / 2)
        assert dirac.spin_y(state) == pytest.approx(0.0, abs=1e-30)
        assert state.norm == pytest.approx(1.0)

    def test_spin_matrices_match_observables(self):
        spec = make_spec(2)
        rng = np.random.default_rng(42)
        c = rng.normal(size=(5, 4)) + 1j * rng.normal(size=(5, 4))
        c /= np.linalg.norm(c)
        state = dirac.DiracState(time=0.0, coefficients=c)
        hbar = CODATA2018.hbar
        for axis, fn in (("z", dirac.spin_z), ("y", dirac.spin_y)):
            mats = dirac.spin_operator_matrices(spec, axis)
            total = sum(c[n + 2].conj() @ mats[n] @ c[n + 2]
                        for n in spec.modes)
            assert fn(state) == pytest.approx(total.real * hbar / 2,
                                              rel=1e-12)

    def test_spin_matrix_blocks_commute_with_energy_sign(self):
        # no matrix element between positive and negative branches
        spec = make_spec(2)
        mats = dirac.spin_operator_matrices(spec, "y")
        for n in spec.modes:
            np.testing.assert_allclose(mats[n][:2, 2:], 0.0, atol=1e-12)
            np.testing.assert_allclose(mats[n][2:, :2], 0.0, atol=1e-12)


class TestPropagation:
    def test_zero_field_state_is_constant(self):
        spec = make_spec(2)
        cfg = make_cfg(peak_field=0.0)
        series = dirac.propagate(dirac.DiracState.ground(spec), cfg, spec)
        hbar = CODATA2018.hbar
        np.testing.assert_allclose(series.sz, hbar / 2, rtol=1e-12)
        np.testing.assert_allclose(series.sy, 0.0, atol=1e-20 * hbar)
        np.testing.assert_allclose(series.norm, 1.0, rtol=1e-12)

    def test_norm_conserved_and_negative_energy_suppressed(self):
        spec = make_spec(4)
        cfg = make_cfg(peak_field=5.53e14, ramp_cycles=5, total_cycles=40)
        series = dirac.propagate(dirac.DiracState.ground(spec), cfg, spec,
                                 tol=1e-11)
        assert series.norm_drift < 1e-10
        assert series.neg_pop[-1] < 1e-6

    def test_direct_and_cycle_map_agree(self):
        spec = make_spec(3)
        cfg = make_cfg(peak_field=5.53e14, ramp_cycles=4, total_cycles=24)
        ground = dirac.DiracState.ground(spec)
        direct = dirac.propagate(ground, cfg, spec, tol=1e-12,
                                 method="direct")
        cycled = dirac.propagate(ground, cfg, spec, tol=1e-12,
                                 method="cycle-map")
        assert cycled.used_cycle_map and not direct.used_cycle_map
        hbar = CODATA2018.hbar
        np.testing.assert_allclose(cycled.sz, direct.sz, atol=1e-9 * hbar)
        np.testing.assert_allclose(cycled.sy, direct.sy, atol=1e-9 * hbar)

    def test_matches_brute_force_oracle(self):
        # dense matrix-exponential stepping, no interaction picture, no
        # adaptivity: an independent check of the whole fast path
        from spinbeam import _engine
        cfg = make_cfg(peak_field=5.53e14, ramp_cycles=1, total_cycles=4)
        model = dirac.build_model(cfg, 2)
        spec = make_spec(2)
        c0 = np.zeros(spec.dim, dtype=np.complex128)
        c0[spec.index(0, "+up")] = 1.0
        oracle = _engine.brute_force_propagate(model, c0, n_snapshots=4,
                                               steps_per_cycle=20000)
        res = _engine.propagate_model(model, c0, tol=1e-12,
                                      snapshots_per_cycle=1,
                                      method="direct", store_states=True)
        for k in range(1, 5):
            dev = np.max(np.abs(res.states[k] - oracle[k]))
            assert dev < 1e-7

    def test_edge_modes_stay_empty(self):
        spec = make_spec(8)
        cfg = make_cfg(peak_field=5.53e14, ramp_cycles=5, total_cycles=30)
        series = dirac.propagate(dirac.DiracState.ground(spec), cfg, spec)
        assert dirac.edge_mode_population(series, 8) < 1e-12

    def test_auto_basis_returns_converged_series(self):
        cfg = make_cfg(peak_field=5.53e14, ramp_cycles=2, total_cycles=12)
        series = dirac.propagate_auto_basis(cfg, n_max=2, edge_tol=1e-10)
        assert dirac.edge_mode_population(series, series.n_max) < 1e-10
