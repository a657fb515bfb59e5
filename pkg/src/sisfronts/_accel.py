"""Optional numba acceleration.

Hot kernels (ODE vector fields, the embedded Runge-Kutta driver and the
PDE stepper) are written in nopython-compatible style and wrapped with
``@njit`` when acceleration is on.  Set ``SISFRONTS_NUMBA=0`` to force
the pure-numpy fallback path; it runs the same source (or a vectorized
twin for the PDE stepper) without compilation.
"""

from __future__ import annotations

import os

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag instead
    numba = None
    _HAVE_NUMBA = False

NUMBA_ENABLED = _HAVE_NUMBA and os.environ.get("SISFRONTS_NUMBA", "1") != "0"


def maybe_jit(fn=None, *, cache=True):
    """Wrap ``fn`` with ``numba.njit`` when acceleration is enabled.

    ``cache=False`` is needed for functions that take other jitted
    functions as arguments (numba cannot disk-cache those).
    """

    def wrap(f):
        if NUMBA_ENABLED:
            return numba.njit(cache=cache)(f)
        return f

    if fn is None:
        return wrap
    return wrap(fn)
