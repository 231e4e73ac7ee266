"""Adaptive Dormand-Prince 8(5,3) integrator.

Explicit embedded pair of order 8 with a combined 5th/3rd order error
estimate, the same scheme scipy uses for ``DOP853``.  Implemented here
as a numba-compatible kernel so solver right-hand sides (also jitted)
can be passed in as first-class functions.  Works on 1-D float64 or
complex128 state vectors.
"""

import numpy as np

from ._accel import njit
from . import _dop853_tableau as _tab

N_STAGES = _tab.N_STAGES
_A = np.ascontiguousarray(_tab.A)
_B = np.ascontiguousarray(_tab.B)
_C = np.ascontiguousarray(_tab.C)
_E3 = np.ascontiguousarray(_tab.E3)
_E5 = np.ascontiguousarray(_tab.E5)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
# local error estimator has order 7
ERROR_EXPONENT = -1.0 / 8.0

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1


@njit(cache=False)
def _error_norm(K, h, scale):
    """Hairer's combined 5th/3rd order error norm (RMS, scaled)."""
    n = K.shape[1]
    err = 0.0
    for i in range(n):
        e5 = 0.0 + 0.0j
        e3 = 0.0 + 0.0j
        for s in range(N_STAGES + 1):
            e5 += _E5[s] * K[s, i]
            e3 += _E3[s] * K[s, i]
        a5 = abs(e5)
        a3 = abs(e3)
        denom = np.hypot(a5, 0.1 * a3)
        corr = a5 / denom if denom > 0.0 else 1.0
        err += (a5 * corr / scale[i]) ** 2
    return abs(h) * np.sqrt(err / n)


@njit(cache=False)
def integrate(rhs, args, y0, t0, t_eval, rtol, atol, h_max, h_init):
    """Integrate dy/dt = rhs(t, y, args) from t0 through sorted t_eval.

    Returns (Y, status, n_accepted, n_rejected) where Y[j] is the state
    at t_eval[j].  On step underflow the remaining rows of Y are left as
    the last computed state and status is nonzero.
    """
    n = y0.size
    y = y0.copy()
    t = t0
    Y = np.empty((t_eval.size, n), dtype=y0.dtype)
    K = np.empty((N_STAGES + 1, n), dtype=y0.dtype)
    f = rhs(t, y, args)
    h = min(h_init, h_max)
    n_accepted = 0
    n_rejected = 0
    t_end = t_eval[t_eval.size - 1]

    for j in range(t_eval.size):
        t_target = t_eval[j]
        while t < t_target:
            # never step past the next output point
            t_resolution = abs(t_end) * 1e-14 + 1e-300
            if t_target - t <= t_resolution:
                # the gap is a rounding residual; snap to the grid point
                t = t_target
                break
            clipped = False
            h_try = h
            if t + h_try >= t_target:
                h_try = t_target - t
                clipped = True
            if h_try <= t_resolution:
                status = STATUS_STEP_UNDERFLOW
                for jj in range(j, t_eval.size):
                    Y[jj] = y
                return Y, status, n_accepted, n_rejected

            # stage evaluations
            K[0] = f
            for s in range(1, N_STAGES):
                dy = np.zeros(n, dtype=y0.dtype)
                for ss in range(s):
                    a = _A[s, ss]
                    if a != 0.0:
                        for i in range(n):
                            dy[i] += a * K[ss, i]
                K[s] = rhs(t + _C[s] * h_try, y + h_try * dy, args)
            y_new = np.zeros(n, dtype=y0.dtype)
            for ss in range(N_STAGES):
                b = _B[ss]
                if b != 0.0:
                    for i in range(n):
                        y_new[i] += b * K[ss, i]
            for i in range(n):
                y_new[i] = y[i] + h_try * y_new[i]
            f_new = rhs(t + h_try, y_new, args)
            K[N_STAGES] = f_new

            scale = np.empty(n, dtype=np.float64)
            for i in range(n):
                m = abs(y[i])
                m2 = abs(y_new[i])
                if m2 > m:
                    m = m2
                scale[i] = atol + rtol * m
            err = _error_norm(K, h_try, scale)

            if err <= 1.0:
                t = t + h_try
                y = y_new
                f = f_new
                n_accepted += 1
                if err == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = min(MAX_FACTOR, SAFETY * err ** ERROR_EXPONENT)
                h_next = h_try * factor
                if not clipped or h_next > h:
                    h = min(h_next, h_max)
            else:
                n_rejected += 1
                h = h_try * max(MIN_FACTOR, SAFETY * err ** ERROR_EXPONENT)
        Y[j] = y
    return Y, STATUS_OK, n_accepted, n_rejected
