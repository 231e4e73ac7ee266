"""Classical electron-spin dynamics in the standing wave.

Fixed-position spin precession under the rotating magnetic field and
under the field's spin density, their closed-form solutions, and the
full coupled trajectory-spin system derived from the classical
Hamiltonian H = (p - qA)^2/2m - (q/m) s.B + (q^2/2m^2c^2) s.(E x A).
"""

import math
from dataclasses import dataclass

import numpy as np

from ._accel import njit
from . import _dop853
from ._engine import window_value
from .constants import CODATA2018, SCALE
from .fields import (LaserConfig, combined_electric, combined_magnetic,
                     combined_potential)


@dataclass
class ClassicalState:
    """Point particle with spin; SI units."""

    position: np.ndarray           # m, 3-vector
    canonical_momentum: np.ndarray  # kg m/s
    spin: np.ndarray               # J s

    @classmethod
    def at_rest(cls):
        """The reference initial condition: r=0, p=0, s=(0,0,hbar/2)."""
        return cls(position=np.zeros(3), canonical_momentum=np.zeros(3),
                   spin=np.array([0.0, 0.0, 0.5 * CODATA2018.hbar]))


@dataclass(frozen=True)
class EnsembleSpec:
    """Classical particles placed uniformly along one wavelength."""

    count: int

    def positions(self, cfg):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        return np.arange(self.count) * cfg.wavelength / self.count


def omega_pauli_internal(e0, k):
    """Wavelength-averaged magnetic precession frequency, internal units."""
    return e0 * e0 / k


def spin_torque_B(s, r, t, cfg, windowed=False):
    """ds/dt = (q/m) s x B(r,t) with the CW combined magnetic field."""
    q = -CODATA2018.elementary_charge
    B = combined_magnetic(r, t, cfg, windowed=windowed)
    return (q / CODATA2018.electron_mass) * np.cross(np.asarray(s, float), B)


def spin_torque_ExA(s, r, t, cfg, windowed=False):
    """ds/dt = -(q^2/2m^2c^2) s x (E x A) with the CW combined fields."""
    q = CODATA2018.elementary_charge
    m = CODATA2018.electron_mass
    c = CODATA2018.speed_of_light
    E = combined_electric(r, t, cfg, windowed=windowed)
    A = combined_potential(r, t, cfg, windowed=windowed)
    axis = np.cross(E, A)
    return -(q * q / (2.0 * m * m * c * c)) * np.cross(np.asarray(s, float), axis)


def _require_circular(cfg):
    if abs(cfg.ellipticity - math.pi / 2.0) > 1e-12:
        raise ValueError("closed-form solutions require circular "
                         "polarization (ellipticity = pi/2)")


def analytic_spin_B(t, x, cfg):
    """Closed-form spin under the rotating B field, initial s = (0,0,hbar/2).

    Valid in the regime q E / (m c) << omega; CW fields.
    """
    _require_circular(cfg)
    om_p = _omega_pauli_si(cfg)
    ang = 2.0 * om_p * t * math.sin(cfg.wavenumber * x) ** 2
    h2 = 0.5 * CODATA2018.hbar
    return np.array([0.0, h2 * math.sin(ang), h2 * math.cos(ang)])


def analytic_spin_ExA(t, x, cfg):
    """Closed-form spin under the spin-density coupling alone."""
    _require_circular(cfg)
    om_p = _omega_pauli_si(cfg)
    ang = -2.0 * om_p * t * math.cos(cfg.wavenumber * x) ** 2
    h2 = 0.5 * CODATA2018.hbar
    return np.array([0.0, h2 * math.sin(ang), h2 * math.cos(ang)])


def _omega_pauli_si(cfg):
    q = CODATA2018.elementary_charge
    m = CODATA2018.electron_mass
    c = CODATA2018.speed_of_light
    return (q * cfg.peak_field) ** 2 * cfg.wavelength / (
        2.0 * math.pi * m * m * c ** 3)


@njit(cache=True)
def _rhs_classical(t, y, args):
    """Coupled (r, p, s) equations, internal units (q = -1, m = c = 1).

    y = (x, ry, rz, px, py, pz, sx, sy, sz).  Field gradients are
    analytic; no finite differences near the slow precession.
    """
    e0, k, eta, ramp_t, total_t, use_B, use_ExA, windowed, fixed_position = args
    q = -1.0
    omega = k
    x = y[0]
    w = window_value(t, ramp_t, total_t) if windowed == 1 else 1.0
    ckx = np.cos(k * x)
    skx = np.sin(k * x)
    s_wt = np.sin(omega * t)
    s_wte = np.sin(omega * t - eta)
    a = -2.0 * w * e0 / omega
    A_y = a * ckx * s_wt
    A_z = a * ckx * s_wte
    dA_y = -a * k * skx * s_wt
    dA_z = -a * k * skx * s_wte
    B_y = -2.0 * w * e0 * skx * s_wte
    B_z = 2.0 * w * e0 * skx * s_wt
    dB_y = -2.0 * w * e0 * k * ckx * s_wte
    dB_z = 2.0 * w * e0 * k * ckx * s_wt
    exa = 4.0 * w * w * e0 * e0 * np.sin(eta) * ckx * ckx / omega
    dexa = -4.0 * w * w * e0 * e0 * np.sin(eta) * 2.0 * ckx * skx

    out = np.zeros(9)
    sx, sy, sz = y[6], y[7], y[8]
    vy = y[4] - q * A_y
    vz = y[5] - q * A_z
    if fixed_position == 0:
        out[0] = y[3]
        out[1] = vy
        out[2] = vz
        fx = q * (vy * dA_y + vz * dA_z)
        if use_B == 1:
            fx += q * (sy * dB_y + sz * dB_z)
        if use_ExA == 1:
            fx -= 0.5 * q * q * sx * dexa
        out[3] = fx
    if use_B == 1:
        # q s x B with B = (0, B_y, B_z)
        out[6] += q * (sy * B_z - sz * B_y)
        out[7] += q * (sz * 0.0 - sx * B_z)
        out[8] += q * (sx * B_y - sy * 0.0)
    if use_ExA == 1:
        # -(q^2/2) s x (E x A) with axis (exa, 0, 0)
        out[6] += 0.0
        out[7] += -0.5 * q * q * (sz * exa)
        out[8] += -0.5 * q * q * (-sy * exa)
    return out


def _classical_args(cfg, use_B=True, use_ExA=True, windowed=True,
                    fixed_position=False):
    e0 = SCALE.efield_to_internal(cfg.peak_field)
    k = cfg.wavenumber * SCALE.length_m
    ramp_t = cfg.ramp_cycles * cfg.period / SCALE.time_s
    total_t = cfg.total_cycles * cfg.period / SCALE.time_s
    return (e0, k, cfg.ellipticity, ramp_t, total_t,
            1 if use_B else 0, 1 if use_ExA else 0,
            1 if windowed else 0, 1 if fixed_position else 0)


def integrate_spin_fixed(x, cfg, t_final, mode="B", tol=1e-12,
                         n_snapshots=256, windowed=False):
    """Numerically integrate the fixed-position spin ODE; oracle-grade.

    mode: "B" (rotating magnetic field), "ExA" (spin-density coupling)
    or "both".  Returns (times_s, spins) with spins in J s.
    """
    use_B = mode in ("B", "both")
    use_ExA = mode in ("ExA", "both")
    args = _classical_args(cfg, use_B=use_B, use_ExA=use_ExA,
                           windowed=windowed, fixed_position=True)
    y0 = np.zeros(9)
    y0[0] = x / SCALE.length_m
    y0[8] = 0.5
    t_eval = np.linspace(0.0, t_final / SCALE.time_s, n_snapshots + 1)[1:]
    h_max = (cfg.period / SCALE.time_s) / 4.0
    Y, status, nacc, nrej = _dop853.integrate(
        _rhs_classical, args, y0, 0.0, t_eval, tol, tol * 0.5, h_max, h_max)
    if status != _dop853.STATUS_OK:
        raise RuntimeError("fixed-position spin integration failed")
    times = np.concatenate([[0.0], t_eval]) * SCALE.time_s
    spins = np.vstack([y0[6:9], Y[:, 6:9]]) * CODATA2018.hbar
    return times, spins


@dataclass
class ClassicalSeries:
    times: np.ndarray       # s
    position: np.ndarray    # (nsnap, 3) m
    momentum: np.ndarray    # (nsnap, 3) kg m/s
    spin: np.ndarray        # (nsnap, 3) J s
    sy: np.ndarray          # J s (alias of spin[:,1], for extraction)
    sz: np.ndarray
    cfg: LaserConfig
    spin_norm_drift: float


def propagate_full_classical(initial, cfg, tol=1e-10, snapshots_per_cycle=8):
    """Integrate the coupled 9-dimensional trajectory-spin system.

    Uses the windowed pulse, the same one the quantum solvers see.
    """
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-13, 1e-6]")
    args = _classical_args(cfg, windowed=True, fixed_position=False)
    y0 = np.empty(9)
    y0[0:3] = np.asarray(initial.position) / SCALE.length_m
    mom_unit = CODATA2018.electron_mass * CODATA2018.speed_of_light
    y0[3:6] = np.asarray(initial.canonical_momentum) / mom_unit
    y0[6:9] = np.asarray(initial.spin) / CODATA2018.hbar
    period_int = cfg.period / SCALE.time_s
    n_snap = int(round(cfg.total_cycles * snapshots_per_cycle))
    t_eval = np.arange(1, n_snap + 1) * (period_int / snapshots_per_cycle)
    t_eval = np.minimum(t_eval, cfg.total_cycles * period_int)
    Y, status, nacc, nrej = _dop853.integrate(
        _rhs_classical, args, y0, 0.0, t_eval, tol, tol * 1e-2,
        period_int / 4.0, period_int / 4.0)
    if status != _dop853.STATUS_OK:
        raise RuntimeError("classical propagation failed: step underflow")
    traj = np.vstack([y0[None, :], Y])
    times = np.concatenate([[0.0], t_eval]) * SCALE.time_s
    spin = traj[:, 6:9] * CODATA2018.hbar
    snorm = np.linalg.norm(spin, axis=1) / (0.5 * CODATA2018.hbar)
    return ClassicalSeries(
        times=times,
        position=traj[:, 0:3] * SCALE.length_m,
        momentum=traj[:, 3:6] * mom_unit,
        spin=spin, sy=spin[:, 1], sz=spin[:, 2], cfg=cfg,
        spin_norm_drift=float(np.max(np.abs(snorm - snorm[0]))))


def ensemble_average_spin(spec, mode, t, cfg):
    """Ensemble average of the closed-form solutions at time t, J s.

    mode: "B-only", "ExA-only", or "both-analytic" (net rotation angle
    2 Omega_P t (sin^2 kx - cos^2 kx) per particle).
    """
    _require_circular(cfg)
    om_p = _omega_pauli_si(cfg)
    xs = spec.positions(cfg)
    kx = cfg.wavenumber * xs
    if mode == "B-only":
        ang = 2.0 * om_p * t * np.sin(kx) ** 2
    elif mode == "ExA-only":
        ang = -2.0 * om_p * t * np.cos(kx) ** 2
    elif mode == "both-analytic":
        ang = 2.0 * om_p * t * (np.sin(kx) ** 2 - np.cos(kx) ** 2)
    else:
        raise ValueError("mode must be B-only, ExA-only, or both-analytic")
    h2 = 0.5 * CODATA2018.hbar
    return np.array([0.0, h2 * float(np.mean(np.sin(ang))),
                     h2 * float(np.mean(np.cos(ang)))])


def ensemble_mean_net_angle(spec, t, cfg):
    """Mean per-particle rotation angle when both torques act, radians.

    The magnetic torque turns the spin by +2 Omega_P t sin^2 kx and the
    spin-density torque by -2 Omega_P t cos^2 kx; averaged uniformly
    over a wavelength the two cancel.
    """
    _require_circular(cfg)
    om_p = _omega_pauli_si(cfg)
    kx = cfg.wavenumber * spec.positions(cfg)
    return float(np.mean(2.0 * om_p * t * (np.sin(kx) ** 2
                                           - np.cos(kx) ** 2)))
