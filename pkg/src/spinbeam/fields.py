"""Laser configuration and exact field evaluation.

Two counterpropagating plane waves with elliptical polarization of
opposite helicity.  Per-beam quantities are continuous-wave; the pulse
envelope (window) is attached to the combined vector potential only.
All functions here take and return SI quantities.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import CODATA2018


@dataclass(frozen=True)
class LaserConfig:
    """Single source of truth for the two-beam field geometry.

    wavelength : m
    peak_field : V/m, per-beam amplitude
    ellipticity : rad, in [0, pi/2]; 0 = linear, pi/2 = circular
    ramp_cycles : turn-on (and turn-off) duration in laser periods
    total_cycles : total interaction time in laser periods
    """

    wavelength: float
    peak_field: float
    ellipticity: float
    ramp_cycles: float
    total_cycles: float

    def __post_init__(self):
        if not self.wavelength > 0.0:
            raise ValueError("wavelength must be positive")
        if self.peak_field < 0.0:
            raise ValueError("peak_field must be non-negative")
        if not 0.0 <= self.ellipticity <= math.pi / 2.0:
            raise ValueError("ellipticity must lie in [0, pi/2]")
        if self.ramp_cycles < 0.0:
            raise ValueError("ramp_cycles must be non-negative")
        if 2.0 * self.ramp_cycles > self.total_cycles:
            raise ValueError("ramp-up plus ramp-down must fit inside the pulse")

    @property
    def wavenumber(self):
        """k = 2 pi / lambda, 1/m."""
        return 2.0 * math.pi / self.wavelength

    @property
    def angular_frequency(self):
        """omega = k c, rad/s."""
        return self.wavenumber * CODATA2018.speed_of_light

    @property
    def period(self):
        """One laser period, s."""
        return self.wavelength / CODATA2018.speed_of_light

    @property
    def ramp_time(self):
        return self.ramp_cycles * self.period

    @property
    def total_time(self):
        return self.total_cycles * self.period


def window(t, cfg):
    """Smooth sin^2 turn-on/turn-off envelope, 1 on the plateau."""
    t = np.asarray(t, dtype=float)
    T = cfg.total_time
    dT = cfg.ramp_time
    if np.any(t < 0.0) or np.any(t > T * (1.0 + 1e-12)):
        raise ValueError("t outside the pulse [0, T]")
    if dT == 0.0:
        return np.ones_like(t)[()] if t.ndim else 1.0
    up = np.sin(np.pi * t / (2.0 * dT)) ** 2
    down = np.sin(np.pi * (T - t) / (2.0 * dT)) ** 2
    w = np.where(t <= dT, up, np.where(t >= T - dT, down, 1.0))
    return w[()] if w.ndim == 0 else w


def window_derivative(t, cfg):
    """dw/dt, continuous at the ramp junctions."""
    t = np.asarray(t, dtype=float)
    T = cfg.total_time
    dT = cfg.ramp_time
    if np.any(t < 0.0) or np.any(t > T * (1.0 + 1e-12)):
        raise ValueError("t outside the pulse [0, T]")
    if dT == 0.0:
        return np.zeros_like(t)[()] if t.ndim else 0.0
    up = (np.pi / (2.0 * dT)) * np.sin(np.pi * t / dT)
    down = -(np.pi / (2.0 * dT)) * np.sin(np.pi * (T - t) / dT)
    dw = np.where(t <= dT, up, np.where(t >= T - dT, down, 0.0))
    return dw[()] if dw.ndim == 0 else dw


def beam_fields(beam, r, t, cfg):
    """Continuous-wave fields (E, B, A) of a single beam.

    Beam 1 propagates in +x, beam 2 in -x; opposite helicity.  Returns
    three 3-vectors in SI units.  The envelope is *not* applied here.
    """
    if beam not in (1, 2):
        raise ValueError("beam must be 1 or 2")
    x = _x_of(r)
    E0 = cfg.peak_field
    k = cfg.wavenumber
    w = cfg.angular_frequency
    eta = cfg.ellipticity
    c = CODATA2018.speed_of_light
    if beam == 1:
        ph, ph_eta = k * x - w * t, k * x - w * t + eta
        sgn = 1.0
    else:
        ph, ph_eta = k * x + w * t, k * x + w * t - eta
        sgn = -1.0
    E = np.array([0.0, E0 * np.cos(ph), E0 * np.cos(ph_eta)])
    B = np.array([0.0, -sgn * (E0 / c) * np.cos(ph_eta),
                  sgn * (E0 / c) * np.cos(ph)])
    A = np.array([0.0, sgn * (E0 / w) * np.sin(ph),
                  sgn * (E0 / w) * np.sin(ph_eta)])
    return E, B, A


def _x_of(r):
    r = np.asarray(r, dtype=float)
    if r.ndim == 0:
        return float(r)
    return r[..., 0] if r.shape[-1] == 3 else r


def combined_potential(r, t, cfg, windowed=True):
    """Total vector potential of both beams, with the pulse envelope.

    A(r,t) = -(2 w(t) E0 / omega) cos(kx) (sin(wt) e_y + sin(wt-eta) e_z)
    """
    x = _x_of(r)
    wt = cfg.angular_frequency * t
    wfac = window(t, cfg) if windowed else 1.0
    amp = -2.0 * wfac * cfg.peak_field / cfg.angular_frequency
    ckx = np.cos(cfg.wavenumber * x)
    return np.array([0.0 * ckx, amp * ckx * np.sin(wt),
                     amp * ckx * np.sin(wt - cfg.ellipticity)])


def combined_electric(r, t, cfg, windowed=True):
    """E = -dA/dt of the combined potential, including the envelope term."""
    x = _x_of(r)
    w = cfg.angular_frequency
    wt = w * t
    eta = cfg.ellipticity
    if windowed:
        wfac, dwfac = window(t, cfg), window_derivative(t, cfg)
    else:
        wfac, dwfac = 1.0, 0.0
    ckx = np.cos(cfg.wavenumber * x)
    pref = 2.0 * cfg.peak_field / w
    ey = pref * ckx * (dwfac * np.sin(wt) + wfac * w * np.cos(wt))
    ez = pref * ckx * (dwfac * np.sin(wt - eta) + wfac * w * np.cos(wt - eta))
    return np.array([0.0 * ckx, ey, ez])


def combined_magnetic(r, t, cfg, windowed=True):
    """B = curl A of the combined potential."""
    x = _x_of(r)
    w = cfg.angular_frequency
    k = cfg.wavenumber
    wt = w * t
    wfac = window(t, cfg) if windowed else 1.0
    skx = np.sin(k * x)
    pref = 2.0 * wfac * cfg.peak_field * k / w
    by = -pref * skx * np.sin(wt - cfg.ellipticity)
    bz = pref * skx * np.sin(wt)
    return np.array([0.0 * skx, by, bz])


def photon_spin_density(which, r, t, cfg):
    """Photonic spin density epsilon_0 E x A, J s / m^3, CW fields.

    which = "per-beam": the constant density carried by each wave;
    "total": sum of the per-beam densities; "combined-field": the
    position-dependent E x A of the superposed field, which equals
    "total" on average over a wavelength.
    """
    eps0 = CODATA2018.vacuum_permittivity
    c = CODATA2018.speed_of_light
    base = (eps0 * cfg.peak_field**2 * cfg.wavelength
            * math.sin(cfg.ellipticity) / (2.0 * math.pi * c))
    if which == "per-beam":
        sx = base
    elif which == "total":
        sx = 2.0 * base
    elif which == "combined-field":
        x = _x_of(r)
        sx = 4.0 * base * np.cos(cfg.wavenumber * x) ** 2
    else:
        raise ValueError("which must be per-beam, total, or combined-field")
    return np.array([sx + 0.0, 0.0 * sx, 0.0 * sx])
