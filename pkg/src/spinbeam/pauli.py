"""Two-spinor Pauli solver in the plane-wave mode basis.

The Hamiltonian carries three switchable pieces: the quadratic vector
potential term, the magnetic dipole term, and the relativistic coupling
of the field's spin density E x A to the electron spin.  Without the
last term the precession frequency scales quadratically in the field;
with it the quadratic law breaks down.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _engine
from .constants import CODATA2018, SCALE
from .fields import LaserConfig, window, window_derivative


@dataclass(frozen=True)
class PauliTermToggles:
    include_A_squared: bool = True
    include_sigma_dot_B: bool = True
    include_E_cross_A: bool = True


NONREL = PauliTermToggles(include_E_cross_A=False)
# magnetic-moment coupling alone; the A^2 term dresses the spatial
# density and biases the extracted frequency at high field, so scaling
# sweeps against the wavelength-averaged formula exclude it
SIGMA_B_ONLY = PauliTermToggles(include_A_squared=False,
                                include_E_cross_A=False)
FULL = PauliTermToggles()


@dataclass
class PauliState:
    """Complex two-spinor coefficients d_n = (d_up, d_down) per mode."""

    time: float                  # s
    coefficients: np.ndarray     # (2 n_max + 1, 2) complex

    @classmethod
    def ground(cls, n_max):
        d = np.zeros((2 * n_max + 1, 2), dtype=np.complex128)
        d[n_max, 0] = 1.0
        return cls(time=0.0, coefficients=d)

    @property
    def norm(self):
        return float(np.sum(np.abs(self.coefficients) ** 2))


def pauli_spin(state, axis):
    """Spin expectation value (hbar/2) <sigma_axis>, J s."""
    d = state.coefficients
    if axis == "z":
        s = 0.5 * float(np.sum(np.abs(d[:, 0]) ** 2 - np.abs(d[:, 1]) ** 2))
    elif axis == "y":
        s = float(np.sum(np.imag(np.conj(d[:, 0]) * d[:, 1])))
    else:
        raise ValueError("axis must be 'y' or 'z'")
    return CODATA2018.hbar * s


def build_model(cfg, n_max, toggles):
    """Internal-unit ModeModel for the (relativistic) Pauli equation.

    Mode couplings: sigma.B connects dn = +-1, A^2 and sigma.(ExA)
    connect dn in {0, +-2}.  The A.grad cross term vanishes identically
    (A is transverse and the reduced wavefunction carries no transverse
    momentum), so no dn = +-1 spin-diagonal ladder appears from it.
    """
    k = cfg.wavenumber * SCALE.length_m
    e0 = SCALE.efield_to_internal(cfg.peak_field)
    q = -1.0
    nmodes = 2 * n_max + 1
    dim = 2 * nmodes
    h0 = np.empty(dim)
    wz = np.empty(dim)
    for n in range(-n_max, n_max + 1):
        base = 2 * (n + n_max)
        h0[base] = h0[base + 1] = (n * k) ** 2 / 2.0
        wz[base], wz[base + 1] = 0.5, -0.5

    def idx(n, s):
        return 2 * (n + n_max) + s

    rows, cols, vals, term_ptr, wf_codes = [], [], [], [0], []

    def add_term(code, entries):
        for r, c, v in entries:
            rows.append(r)
            cols.append(c)
            vals.append(v)
        term_ptr.append(len(rows))
        wf_codes.append(code)

    # sigma.B: H = q E0 sin(kx) (sin(wt-eta) sigma_y - sin(wt) sigma_z)
    # with <n|sin kx|n'> = (delta_{n,n'+1} - delta_{n,n'-1}) / (2i)
    if toggles.include_sigma_dot_B:
        ent_sin, ent_sin_eta = [], []
        for n in range(-n_max, n_max + 1):
            for np_, skx in ((n - 1, 1.0 / 2.0j), (n + 1, -1.0 / 2.0j)):
                if abs(np_) > n_max:
                    continue
                # -q E0 sin(kx) sigma_z  (waveform w sin wt)
                ent_sin.append((idx(n, 0), idx(np_, 0), -q * e0 * skx))
                ent_sin.append((idx(n, 1), idx(np_, 1), q * e0 * skx))
                # +q E0 sin(kx) sigma_y  (waveform w sin(wt-eta))
                ent_sin_eta.append((idx(n, 0), idx(np_, 1), q * e0 * skx * (-1.0j)))
                ent_sin_eta.append((idx(n, 1), idx(np_, 0), q * e0 * skx * (+1.0j)))
        add_term(_engine.WF_W_SIN, ent_sin)
        add_term(_engine.WF_W_SIN_ETA, ent_sin_eta)

    # q^2 A^2 / 2: coefficient q^2 (2 E0/omega)^2 / 2 * cos^2 kx,
    # time dependence w^2 (sin^2 wt + sin^2(wt-eta))
    if toggles.include_A_squared:
        coef = q * q * (2.0 * e0 / k) ** 2 / 2.0
        ent = []
        for n in range(-n_max, n_max + 1):
            for s in (0, 1):
                ent.append((idx(n, s), idx(n, s), 0.5 * coef))
                for np_ in (n - 2, n + 2):
                    if abs(np_) <= n_max:
                        ent.append((idx(n, s), idx(np_, s), 0.25 * coef))
        add_term(_engine.WF_W2_SUMSQ, ent)

    # (q^2/4) sigma.(E x A): (E x A)_x = (4 w^2 E0^2 / omega) sin(eta) cos^2 kx
    # (the envelope-derivative parts of E cancel exactly in E x A)
    if toggles.include_E_cross_A:
        coef = q * q * e0 * e0 * math.sin(cfg.ellipticity) / k
        ent = []
        for n in range(-n_max, n_max + 1):
            pairs = [((idx(n, 0), idx(n, 1)), 0.5), ((idx(n, 1), idx(n, 0)), 0.5)]
            for np_ in (n - 2, n + 2):
                if abs(np_) <= n_max:
                    pairs.append(((idx(n, 0), idx(np_, 1)), 0.25))
                    pairs.append(((idx(n, 1), idx(np_, 0)), 0.25))
            for (r, c), frac in pairs:
                ent.append((r, c, frac * coef))
        add_term(_engine.WF_W2, ent)

    sy_a = np.array([idx(n, 0) for n in range(-n_max, n_max + 1)], dtype=np.int64)
    sy_b = np.array([idx(n, 1) for n in range(-n_max, n_max + 1)], dtype=np.int64)
    period_int = cfg.period / SCALE.time_s
    return _engine.ModeModel(
        h0=h0,
        rows=np.array(rows, dtype=np.int64),
        cols=np.array(cols, dtype=np.int64),
        vals=np.array(vals, dtype=np.complex128),
        term_ptr=np.array(term_ptr, dtype=np.int64),
        wf_codes=np.array(wf_codes, dtype=np.int64),
        omega=2.0 * np.pi / period_int, eta=cfg.ellipticity,
        ramp_t=cfg.ramp_cycles * period_int,
        total_t=cfg.total_cycles * period_int,
        wz=wz, sy_a=sy_a, sy_b=sy_b,
        neg_mask=np.zeros(dim, dtype=np.bool_))


def assemble_pauli_hamiltonian(t, cfg, toggles, n_max):
    """Dense Pauli Hamiltonian at time t over (mode, spin), in J."""
    if not 0.0 <= t <= cfg.total_time * (1.0 + 1e-12):
        raise ValueError("t outside the pulse [0, T]")
    model = build_model(cfg, n_max, toggles)
    return model.hamiltonian(t / SCALE.time_s) * SCALE.energy_J


@dataclass
class PauliSeries:
    times: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    norm: np.ndarray
    final: PauliState
    states: list | None
    cfg: LaserConfig
    n_max: int
    toggles: PauliTermToggles
    used_cycle_map: bool
    norm_drift: float


def propagate_pauli(initial, cfg, toggles=FULL, n_max=8, tol=1e-10,
                    snapshots_per_cycle=8, method="auto", store_states=False):
    """Propagate a PauliState through the pulse, interaction picture
    over the kinetic diagonal."""
    if not toggles.include_sigma_dot_B:
        raise ValueError("physics runs require the sigma.B term")
    model = build_model(cfg, n_max, toggles)
    c0 = np.asarray(initial.coefficients, dtype=np.complex128).reshape(-1)
    res = _engine.propagate_model(
        model, c0, tol=tol, snapshots_per_cycle=snapshots_per_cycle,
        method=method, store_states=store_states)
    hbar = CODATA2018.hbar
    states = None
    if store_states and res.states is not None:
        states = [PauliState(time=t * SCALE.time_s,
                             coefficients=s.reshape(-1, 2).copy())
                  for t, s in zip(res.times, res.states)]
    final = PauliState(time=res.times[-1] * SCALE.time_s,
                       coefficients=res.final_state.reshape(-1, 2).copy())
    return PauliSeries(
        times=res.times * SCALE.time_s, sy=res.sy * hbar, sz=res.sz * hbar,
        norm=res.norm, final=final, states=states, cfg=cfg, n_max=n_max,
        toggles=toggles, used_cycle_map=res.used_cycle_map,
        norm_drift=res.norm_drift)
