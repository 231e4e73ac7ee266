"""Shared propagation machinery for the mode-basis quantum solvers.

Both the Dirac and the Pauli solver reduce to the same structure: a
diagonal free Hamiltonian ``h0`` plus a sum of static sparse coupling
matrices, each multiplied by a scalar waveform built from the pulse
envelope and the two laser quadratures.  Propagation happens in the
interaction picture (the diagonal phases are removed analytically).

Everything here works in internal relativistic units (hbar = c = m = 1).
"""

from dataclasses import dataclass

import numpy as np

from ._accel import njit
from . import _dop853

# waveform codes
WF_W_SIN = 0        # w(t) sin(omega t)
WF_W_SIN_ETA = 1    # w(t) sin(omega t - eta)
WF_W2_SUMSQ = 2     # w(t)^2 (sin^2(omega t) + sin^2(omega t - eta))
WF_W2 = 3           # w(t)^2


@njit(cache=True)
def window_value(t, ramp_t, total_t):
    """sin^2 envelope; clamps roundoff excursions at the pulse edges."""
    if t <= 0.0:
        return 0.0 if ramp_t > 0.0 else 1.0
    if t >= total_t:
        return 0.0 if ramp_t > 0.0 else 1.0
    if t < ramp_t:
        s = np.sin(np.pi * t / (2.0 * ramp_t))
        return s * s
    if t > total_t - ramp_t:
        s = np.sin(np.pi * (total_t - t) / (2.0 * ramp_t))
        return s * s
    return 1.0


@njit(cache=True)
def waveform_value(code, t, omega, eta, ramp_t, total_t):
    w = window_value(t, ramp_t, total_t)
    if code == 0:
        return w * np.sin(omega * t)
    if code == 1:
        return w * np.sin(omega * t - eta)
    if code == 2:
        sy = np.sin(omega * t)
        sz = np.sin(omega * t - eta)
        return w * w * (sy * sy + sz * sz)
    return w * w


@njit(cache=False)
def _rhs_interaction(t, y, args):
    """Interaction-picture RHS, shared by state (ncols=1) and matrix ODEs."""
    h0, rows, cols, vals, term_ptr, wf_codes, omega, eta, ramp_t, total_t, ncols = args
    dim = h0.size
    ph = np.exp(1j * h0 * t)
    out = np.zeros_like(y)
    for k in range(wf_codes.size):
        s = waveform_value(wf_codes[k], t, omega, eta, ramp_t, total_t)
        if s == 0.0:
            continue
        for idx in range(term_ptr[k], term_ptr[k + 1]):
            r = rows[idx]
            c = cols[idx]
            f = -1j * s * vals[idx] * ph[r] * np.conj(ph[c])
            for j in range(ncols):
                out[r * ncols + j] += f * y[c * ncols + j]
    return out


@njit(cache=False)
def _plateau_loop(segs, c0, n_cycles, wz, sy_a, sy_b, neg_mask):
    """Apply per-cycle segment propagators and record observables.

    segs: (stride, dim, dim) Schroedinger-picture segment maps covering
    one plateau cycle.  Returns per-segment-boundary observables
    (s_y, s_z, norm, negative-energy population) and the final state.
    """
    stride = segs.shape[0]
    dim = c0.size
    nsnap = n_cycles * stride
    sy = np.empty(nsnap)
    sz = np.empty(nsnap)
    norm = np.empty(nsnap)
    negpop = np.empty(nsnap)
    c = c0.copy()
    tmp = np.empty(dim, dtype=np.complex128)
    isnap = 0
    for _ in range(n_cycles):
        for jseg in range(stride):
            for i in range(dim):
                acc = 0.0 + 0.0j
                for m in range(dim):
                    acc += segs[jseg, i, m] * c[m]
                tmp[i] = acc
            c[:] = tmp
            s_z = 0.0
            s_y = 0.0
            nn = 0.0
            np_ = 0.0
            for i in range(dim):
                p = c[i].real * c[i].real + c[i].imag * c[i].imag
                s_z += wz[i] * p
                nn += p
                if neg_mask[i]:
                    np_ += p
            for q in range(sy_a.size):
                a = c[sy_a[q]]
                b = c[sy_b[q]]
                s_y += (a.real * b.imag - a.imag * b.real)
            sy[isnap] = s_y
            sz[isnap] = s_z
            norm[isnap] = nn
            negpop[isnap] = np_
            isnap += 1
    return sy, sz, norm, negpop, c


@dataclass
class ModeModel:
    """Sparse time-dependent Hamiltonian over a plane-wave mode basis."""

    h0: np.ndarray            # (dim,) diagonal free energies
    rows: np.ndarray          # COO entries of the coupling terms
    cols: np.ndarray
    vals: np.ndarray          # complex, with field amplitudes folded in
    term_ptr: np.ndarray      # (n_terms+1,) slices into rows/cols/vals
    wf_codes: np.ndarray      # (n_terms,) waveform code per term
    omega: float              # laser angular frequency, internal units
    eta: float
    ramp_t: float             # ramp duration, internal units
    total_t: float            # pulse duration, internal units
    wz: np.ndarray            # spin-z weight per basis index (units of hbar)
    sy_a: np.ndarray          # index pairs: s_y = sum Im(conj(c[a]) c[b])
    sy_b: np.ndarray
    neg_mask: np.ndarray      # negative-energy branch indices

    @property
    def dim(self):
        return self.h0.size

    def rhs_args(self, ncols=1):
        return (self.h0, self.rows, self.cols, self.vals, self.term_ptr,
                self.wf_codes, self.omega, self.eta, self.ramp_t,
                self.total_t, ncols)

    def hamiltonian(self, t):
        """Dense Schroedinger-picture H(t), internal units.  Test surface
        and brute-force oracle building block."""
        dim = self.dim
        H = np.zeros((dim, dim), dtype=np.complex128)
        np.fill_diagonal(H, self.h0)
        for k in range(self.wf_codes.size):
            s = waveform_value(self.wf_codes[k], t, self.omega, self.eta,
                               self.ramp_t, self.total_t)
            sl = slice(self.term_ptr[k], self.term_ptr[k + 1])
            np.add.at(H, (self.rows[sl], self.cols[sl]), s * self.vals[sl])
        return H

    def observables(self, c):
        """(s_y, s_z, norm, negative-energy population) of a state."""
        p = np.abs(c) ** 2
        s_z = float(np.dot(self.wz, p))
        s_y = float(np.sum(np.imag(np.conj(c[self.sy_a]) * c[self.sy_b])))
        return s_y, s_z, float(p.sum()), float(p[self.neg_mask].sum())


@dataclass
class PropagationResult:
    """Snapshot series of a single propagation, internal time units."""

    times: np.ndarray         # (nsnap,)
    sy: np.ndarray            # units of hbar
    sz: np.ndarray
    norm: np.ndarray
    neg_pop: np.ndarray
    final_state: np.ndarray
    states: np.ndarray | None     # (nsnap, dim) when requested
    n_accepted: int
    n_rejected: int
    used_cycle_map: bool

    @property
    def norm_drift(self):
        return float(np.max(np.abs(self.norm - self.norm[0])))


class PropagationFailure(RuntimeError):
    """Adaptive step-size underflow; carries diagnostics."""

    def __init__(self, t, h_info):
        super().__init__(
            f"propagation failed: step size underflow at t={t:.6e} "
            f"(internal units); {h_info}")
        self.t = t


def _integrate_states(model, c0, t_grid, tol, h_max, store_states):
    """Direct adaptive integration through every grid point."""
    args = model.rhs_args(1)
    t_eval = np.asarray(t_grid[1:], dtype=float)
    Y, status, nacc, nrej = _dop853.integrate(
        _rhs_interaction, args, c0.astype(np.complex128), float(t_grid[0]),
        t_eval, tol, tol, h_max, h_max)
    if status != _dop853.STATUS_OK:
        raise PropagationFailure(t_grid[0], f"accepted={nacc} rejected={nrej}")
    states = np.vstack([c0[None, :], Y])
    return states, nacc, nrej


def _interaction_to_schroedinger(U_int, h0, t1, t0):
    """U_S(t1,t0) = D(t1) U_I(t1,t0) D(t0)^dagger with D = diag(e^{-i h0 t})."""
    d1 = np.exp(-1j * h0 * t1)
    d0 = np.exp(-1j * h0 * t0)
    return (d1[:, None] * U_int) * np.conj(d0)[None, :]


def _unitarize(U):
    """Project onto the closest unitary matrix (polar decomposition).

    The exact segment propagator is unitary; the integrated one deviates
    by the integration error.  Returns the projection and the deviation
    that was removed.
    """
    u, s, vh = np.linalg.svd(U)
    dev = float(np.max(np.abs(s - 1.0)))
    return u @ vh, dev


def propagate_model(model, c0, tol=1e-10, snapshots_per_cycle=8,
                    method="auto", store_states=False):
    """Propagate a ModeModel from t=0 to t=T.

    method: "direct" integrates the full pulse adaptively; "cycle-map"
    reuses the one-cycle propagator on the plateau (the interaction is
    strictly periodic there), built from the same adaptive integrator;
    "auto" selects cycle-map for long plateaus when the pulse geometry
    allows it.
    """
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-13, 1e-6]")
    c0 = np.asarray(c0, dtype=np.complex128)
    period = 2.0 * np.pi / model.omega
    stride = int(snapshots_per_cycle)
    total_cycles = model.total_t / period
    n_total = int(round(total_cycles * stride))
    tau = period / stride
    t_grid = np.arange(n_total + 1) * tau
    # integrate, never asking for points beyond T
    t_grid = np.minimum(t_grid, model.total_t)
    h_max = period / 4.0

    ramp_cycles = model.ramp_t / period
    plateau_cycles = total_cycles - 2.0 * ramp_cycles
    cycle_map_ok = (
        abs(ramp_cycles - round(ramp_cycles)) < 1e-9
        and abs(total_cycles - round(total_cycles)) < 1e-9
        and plateau_cycles >= 2.0 - 1e-9
        and not store_states
    )
    if method == "direct" or (method == "auto" and not cycle_map_ok):
        states, nacc, nrej = _integrate_states(
            model, c0, t_grid, tol, h_max, store_states)
        obs = np.array([model.observables(c) for c in states])
        return PropagationResult(
            times=t_grid, sy=obs[:, 0], sz=obs[:, 1], norm=obs[:, 2],
            neg_pop=obs[:, 3], final_state=states[-1],
            states=states if store_states else None,
            n_accepted=nacc, n_rejected=nrej, used_cycle_map=False)
    if method == "cycle-map" and not cycle_map_ok:
        raise ValueError("cycle-map requires integer ramp/total cycles, "
                         "a plateau of >= 2 cycles, and store_states=False")

    nramp = int(round(ramp_cycles))
    nplateau = int(round(plateau_cycles))
    t_up = nramp * period
    t_down = model.total_t - nramp * period
    # ramps are integrated step by step; a tighter per-step tolerance
    # keeps the accumulated norm drift at the run-level tolerance
    ramp_tol = max(min(tol, 1e-12), 1e-13)

    # ramp-up: direct integration with snapshots
    i_up = nramp * stride
    states_up, nacc, nrej = _integrate_states(
        model, c0, t_grid[:i_up + 1], ramp_tol, h_max, False)

    # one plateau cycle as a matrix ODE in the interaction picture,
    # checkpointed at the segment boundaries
    dim = model.dim
    eye = np.eye(dim, dtype=np.complex128).reshape(-1)
    seg_times = t_up + np.arange(1, stride + 1) * tau
    Y, status, na2, nr2 = _dop853.integrate(
        _rhs_interaction, model.rhs_args(dim), eye, t_up, seg_times,
        tol, tol, h_max, h_max)
    if status != _dop853.STATUS_OK:
        raise PropagationFailure(t_up, "matrix segment integration")
    nacc += na2
    nrej += nr2
    segs = np.empty((stride, dim, dim), dtype=np.complex128)
    prev = np.eye(dim, dtype=np.complex128)
    prev_t = t_up
    for jseg in range(stride):
        U_cum = _interaction_to_schroedinger(
            Y[jseg].reshape(dim, dim), model.h0, seg_times[jseg], t_up)
        # segment map = cumulative map times inverse of the previous one
        U_seg = U_cum @ prev.conj().T
        segs[jseg], dev = _unitarize(U_seg)
        if dev > 1e4 * tol:
            raise PropagationFailure(
                seg_times[jseg], f"segment unitarity deviation {dev:.3e}")
        prev = U_cum
        prev_t = seg_times[jseg]

    # plateau: repeated segment application (Schroedinger picture)
    c_up_int = states_up[-1]
    c_up = np.exp(-1j * model.h0 * t_up) * c_up_int
    sy_p, sz_p, norm_p, neg_p, c_end = _plateau_loop(
        segs, c_up, nplateau, model.wz, model.sy_a, model.sy_b,
        model.neg_mask)

    # ramp-down: direct integration from the plateau end state
    c_down_int = np.exp(1j * model.h0 * t_down) * c_end
    i_down = (nramp + nplateau) * stride
    states_down, na3, nr3 = _integrate_states(
        model, c_down_int, t_grid[i_down:], ramp_tol, h_max, False)
    nacc += na3
    nrej += nr3

    obs_up = np.array([model.observables(c) for c in states_up])
    obs_down = np.array([model.observables(c) for c in states_down[1:]])
    sy = np.concatenate([obs_up[:, 0], sy_p, obs_down[:, 0]])
    sz = np.concatenate([obs_up[:, 1], sz_p, obs_down[:, 1]])
    norm = np.concatenate([obs_up[:, 2], norm_p, obs_down[:, 2]])
    neg = np.concatenate([obs_up[:, 3], neg_p, obs_down[:, 3]])
    return PropagationResult(
        times=t_grid, sy=sy, sz=sz, norm=norm, neg_pop=neg,
        final_state=states_down[-1], states=None,
        n_accepted=nacc, n_rejected=nrej, used_cycle_map=True)


def brute_force_propagate(model, c0, n_snapshots, steps_per_unit_time=None,
                          steps_per_cycle=10000):
    """Independent oracle: dense midpoint matrix-exponential stepping.

    Works in the Schroedinger picture with the full dense H(t); no
    interaction picture, no adaptivity, no sparsity.  Returns the states
    at ``n_snapshots + 1`` uniformly spaced times including t=0 and t=T,
    with the interaction-picture diagonal phases divided out so results
    compare directly with :func:`propagate_model` states.
    """
    import scipy.linalg

    period = 2.0 * np.pi / model.omega
    n_steps = int(round(model.total_t / period * steps_per_cycle))
    dt = model.total_t / n_steps
    snap_every = n_steps // n_snapshots
    c = np.asarray(c0, dtype=np.complex128).copy()
    out = [c.copy()]
    t = 0.0
    for istep in range(n_steps):
        H = model.hamiltonian(t + 0.5 * dt)
        c = scipy.linalg.expm(-1j * H * dt) @ c
        t += dt
        if (istep + 1) % snap_every == 0 and len(out) <= n_snapshots:
            out.append(np.exp(1j * model.h0 * t) * c)
    return np.array(out)
