"""Momentum-space Dirac solver.

The electron wavefunction is expanded in plane-wave bispinor modes
``u_n^gamma exp(i n k x)`` with gamma in {+up, +down, -up, -down}; the
transverse field couples neighbouring modes only.  Propagation removes
the free phases exp(-/+ i E_n t / hbar) analytically and integrates the
remaining interaction-driven dynamics adaptively (see _engine).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _engine
from .constants import CODATA2018, SCALE
from .fields import LaserConfig, window

GAMMAS = ("+up", "+down", "-up", "-down")

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)

ALPHA_X = np.block([[np.zeros((2, 2)), _SIGMA_X], [_SIGMA_X, np.zeros((2, 2))]])
ALPHA_Y = np.block([[np.zeros((2, 2)), _SIGMA_Y], [_SIGMA_Y, np.zeros((2, 2))]])
ALPHA_Z = np.block([[np.zeros((2, 2)), _SIGMA_Z], [_SIGMA_Z, np.zeros((2, 2))]])
BETA = np.diag([1.0, 1.0, -1.0, -1.0]).astype(np.complex128)


@dataclass(frozen=True)
class BasisSpec:
    """Truncated mode basis: n in [-n_max, n_max], photon wavenumber k (1/m)."""

    n_max: int
    k: float

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if not self.k > 0.0:
            raise ValueError("k must be positive")

    @property
    def modes(self):
        return range(-self.n_max, self.n_max + 1)

    @property
    def dim(self):
        return 4 * (2 * self.n_max + 1)

    def index(self, n, gamma):
        return 4 * (n + self.n_max) + GAMMAS.index(gamma)


def mode_energy(n, k_internal):
    """Relativistic energy-momentum relation, internal units (mc^2 = 1)."""
    return math.sqrt(1.0 + (n * k_internal) ** 2)


def build_bispinors(spec):
    """All 4(2 n_max + 1) unit bispinors, keyed by (n, gamma).

    Each u_n^{+-gamma} is an eigenvector of the free Dirac matrix
    c hbar k n alpha_x + m c^2 beta with eigenvalue +-E_n.
    """
    k_int = spec.k * SCALE.length_m
    table = {}
    for n in spec.modes:
        e = mode_energy(n, k_int)
        norm = math.sqrt((e + 1.0) / (2.0 * e))
        b = n * k_int / (e + 1.0)
        for gamma in GAMMAS:
            chi = np.array([1.0, 0.0]) if gamma.endswith("up") else np.array([0.0, 1.0])
            lower = b * (_SIGMA_X.real @ chi)
            if gamma.startswith("+"):
                u = norm * np.concatenate([chi, lower])
            else:
                u = norm * np.concatenate([-lower, chi])
            table[(n, gamma)] = u.astype(np.complex128)
    return table


@dataclass
class CouplingMatrix:
    """Basis-sandwiched velocity operators for adjacent mode pairs.

    alpha_y[(n, n')] and alpha_z[(n, n')] are the 4x4 complex blocks
    <u_n^gamma| alpha_{y,z} |u_n'^gamma'> for |n - n'| = 1.
    """

    alpha_y: dict
    alpha_z: dict


def build_couplings(spec, bispinors=None):
    if bispinors is None:
        bispinors = build_bispinors(spec)
    ay, az = {}, {}
    for n in spec.modes:
        for np_ in (n - 1, n + 1):
            if abs(np_) > spec.n_max:
                continue
            by = np.empty((4, 4), dtype=np.complex128)
            bz = np.empty((4, 4), dtype=np.complex128)
            for i, g in enumerate(GAMMAS):
                un = bispinors[(n, g)]
                for j, gp in enumerate(GAMMAS):
                    unp = bispinors[(np_, gp)]
                    by[i, j] = np.conj(un) @ ALPHA_Y @ unp
                    bz[i, j] = np.conj(un) @ ALPHA_Z @ unp
            ay[(n, np_)] = by
            az[(n, np_)] = bz
    return CouplingMatrix(alpha_y=ay, alpha_z=az)


@dataclass
class DiracState:
    """Coefficient quadruples c_n = (c+up, c+down, c-up, c-down)."""

    time: float                  # s
    coefficients: np.ndarray     # (2 n_max + 1, 4) complex, n ascending

    @classmethod
    def ground(cls, spec):
        """Electron at rest, spin up along z: c_0^{+up} = 1."""
        c = np.zeros((2 * spec.n_max + 1, 4), dtype=np.complex128)
        c[spec.n_max, 0] = 1.0
        return cls(time=0.0, coefficients=c)

    @property
    def norm(self):
        return float(np.sum(np.abs(self.coefficients) ** 2))


def spin_z(state):
    """<S_z> = (hbar/2) sum (|c+up|^2 + |c-up|^2 - |c+down|^2 - |c-down|^2), J s."""
    c = state.coefficients
    p = np.abs(c) ** 2
    return 0.5 * CODATA2018.hbar * float(
        p[:, 0].sum() + p[:, 2].sum() - p[:, 1].sum() - p[:, 3].sum())


def spin_operator_matrices(spec, axis):
    """Per-mode 4x4 matrices of the Foldy-Wouthuysen spin operator.

    Built numerically by conjugating the standard Dirac spin matrix with
    the unitary assembled from the bispinors at each n (units of hbar).
    """
    sigma = {"x": _SIGMA_X, "y": _SIGMA_Y, "z": _SIGMA_Z}[axis]
    big_sigma = np.block([[sigma, np.zeros((2, 2))],
                          [np.zeros((2, 2)), sigma]]).astype(np.complex128)
    bis = build_bispinors(spec)
    out = {}
    for n in spec.modes:
        Bmat = np.column_stack([bis[(n, g)] for g in GAMMAS])
        s_fw = Bmat @ (0.5 * big_sigma) @ Bmat.conj().T
        out[n] = Bmat.conj().T @ s_fw @ Bmat
    return out


def spin_y(state, spec=None):
    """<S_y> in J s; the FW y-spin is block sigma_y within each branch."""
    c = state.coefficients
    s = np.sum(np.imag(np.conj(c[:, 0]) * c[:, 1])
               + np.imag(np.conj(c[:, 2]) * c[:, 3]))
    return CODATA2018.hbar * float(s)


def build_model(cfg, n_max):
    """Internal-unit ModeModel of Eqs. of motion for the coefficient ladder."""
    k_int = cfg.wavenumber * SCALE.length_m
    e_int = SCALE.efield_to_internal(cfg.peak_field)
    spec = BasisSpec(n_max=n_max, k=cfg.wavenumber)
    coup = build_couplings(spec)
    dim = spec.dim
    h0 = np.empty(dim)
    wz = np.empty(dim)
    neg_mask = np.zeros(dim, dtype=np.bool_)
    for n in spec.modes:
        e = mode_energy(n, k_int)
        base = 4 * (n + n_max)
        h0[base + 0] = e
        h0[base + 1] = e
        h0[base + 2] = -e
        h0[base + 3] = -e
        wz[base:base + 4] = (0.5, -0.5, 0.5, -0.5)
        neg_mask[base + 2] = True
        neg_mask[base + 3] = True

    q = -1.0  # electron charge in units of |e|
    pref = q * e_int / k_int
    rows_y, cols_y, vals_y = [], [], []
    rows_z, cols_z, vals_z = [], [], []
    for (n, np_), by in coup.alpha_y.items():
        bz = coup.alpha_z[(n, np_)]
        for i in range(4):
            for j in range(4):
                r = 4 * (n + n_max) + i
                c = 4 * (np_ + n_max) + j
                if by[i, j] != 0.0:
                    rows_y.append(r)
                    cols_y.append(c)
                    vals_y.append(pref * by[i, j])
                if bz[i, j] != 0.0:
                    rows_z.append(r)
                    cols_z.append(c)
                    vals_z.append(pref * bz[i, j])
    rows = np.array(rows_y + rows_z, dtype=np.int64)
    cols = np.array(cols_y + cols_z, dtype=np.int64)
    vals = np.array(vals_y + vals_z, dtype=np.complex128)
    term_ptr = np.array([0, len(rows_y), len(rows)], dtype=np.int64)
    wf_codes = np.array([_engine.WF_W_SIN, _engine.WF_W_SIN_ETA],
                        dtype=np.int64)

    sy_a, sy_b = [], []
    for n in spec.modes:
        base = 4 * (n + n_max)
        sy_a.extend([base + 0, base + 2])
        sy_b.extend([base + 1, base + 3])

    period_int = cfg.period / SCALE.time_s
    return _engine.ModeModel(
        h0=h0, rows=rows, cols=cols, vals=vals, term_ptr=term_ptr,
        wf_codes=wf_codes, omega=2.0 * np.pi / period_int,
        eta=cfg.ellipticity,
        ramp_t=cfg.ramp_cycles * period_int,
        total_t=cfg.total_cycles * period_int,
        wz=wz, sy_a=np.array(sy_a, dtype=np.int64),
        sy_b=np.array(sy_b, dtype=np.int64), neg_mask=neg_mask)


def assemble_interaction(t, cfg, spec, couplings=None):
    """Dense interaction Hamiltonian V(t) of the mode ladder, in J.

    Block-tridiagonal in n, Hermitian, linear in the peak field.
    """
    if not 0.0 <= t <= cfg.total_time * (1.0 + 1e-12):
        raise ValueError("t outside the pulse [0, T]")
    if couplings is None:
        couplings = build_couplings(spec)
    w = window(t, cfg)
    wt = cfg.angular_frequency * t
    q = -CODATA2018.elementary_charge
    pref = w * q * cfg.peak_field / cfg.wavenumber
    sy = math.sin(wt)
    sz = math.sin(wt - cfg.ellipticity)
    dim = spec.dim
    V = np.zeros((dim, dim), dtype=np.complex128)
    for (n, np_), by in couplings.alpha_y.items():
        bz = couplings.alpha_z[(n, np_)]
        r = 4 * (n + spec.n_max)
        c = 4 * (np_ + spec.n_max)
        V[r:r + 4, c:c + 4] = pref * (by * sy + bz * sz)
    return V


@dataclass
class DiracSeries:
    """Snapshot series of a Dirac propagation, SI units."""

    times: np.ndarray        # s
    sy: np.ndarray           # J s
    sz: np.ndarray           # J s
    norm: np.ndarray
    neg_pop: np.ndarray
    final: DiracState
    states: list | None
    cfg: LaserConfig
    n_max: int
    used_cycle_map: bool
    norm_drift: float


def propagate(initial, cfg, spec, tol=1e-10, snapshots_per_cycle=8,
              method="auto", store_states=False):
    """Propagate a DiracState through the pulse [0, T].

    Integration happens in the interaction picture; snapshots are taken
    at ``snapshots_per_cycle`` per laser period.  Returned spin series
    are in J s; returned coefficients have the free phases removed
    (interaction picture), which leaves every observable unchanged.
    """
    model = build_model(cfg, spec.n_max)
    c0 = np.asarray(initial.coefficients, dtype=np.complex128).reshape(-1)
    res = _engine.propagate_model(
        model, c0, tol=tol, snapshots_per_cycle=snapshots_per_cycle,
        method=method, store_states=store_states)
    hbar = CODATA2018.hbar
    states = None
    if store_states and res.states is not None:
        states = [DiracState(time=t * SCALE.time_s,
                             coefficients=s.reshape(-1, 4).copy())
                  for t, s in zip(res.times, res.states)]
    final = DiracState(time=res.times[-1] * SCALE.time_s,
                       coefficients=res.final_state.reshape(-1, 4).copy())
    return DiracSeries(
        times=res.times * SCALE.time_s, sy=res.sy * hbar, sz=res.sz * hbar,
        norm=res.norm, neg_pop=res.neg_pop, final=final, states=states,
        cfg=cfg, n_max=spec.n_max, used_cycle_map=res.used_cycle_map,
        norm_drift=res.norm_drift)


def edge_mode_population(series_or_state, n_max):
    """Total population of the outermost modes; truncation diagnostic."""
    if isinstance(series_or_state, DiracSeries):
        c = series_or_state.final.coefficients
    else:
        c = series_or_state.coefficients
    p = np.abs(c) ** 2
    return float(p[0].sum() + p[-1].sum())


def propagate_auto_basis(cfg, tol=1e-10, n_max=8, edge_tol=1e-12,
                         snapshots_per_cycle=8, method="auto",
                         max_n_max=128):
    """Propagate from the spin-up zero-momentum ground state, growing the
    basis until the outermost-mode population stays below ``edge_tol``."""
    while True:
        spec = BasisSpec(n_max=n_max, k=cfg.wavenumber)
        series = propagate(DiracState.ground(spec), cfg, spec, tol=tol,
                           snapshots_per_cycle=snapshots_per_cycle,
                           method=method)
        if edge_mode_population(series, n_max) <= edge_tol or n_max >= max_n_max:
            return series
        n_max *= 2
