"""Optional numba acceleration.

Hot kernels are decorated with :func:`njit`.  Setting the environment
variable ``SPINBEAM_DISABLE_NUMBA=1`` (or failing to import numba)
selects a pure-numpy fallback in which the decorator is a no-op; the
same source then runs as ordinary Python.  ``benchmarks/bench_numba.py``
compares both paths.
"""

import os

USING_NUMBA = False

if os.environ.get("SPINBEAM_DISABLE_NUMBA", "0") not in ("1", "true", "yes"):
    try:
        import numba

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        USING_NUMBA = False

if USING_NUMBA:
    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
else:
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap
