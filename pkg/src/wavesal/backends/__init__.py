"""Kernel backend selection.

The numerically hot inner loops (separable filtering, the PSS window
scan) exist twice: a numba-jitted version and a pure-numpy version.  The
``WAVESAL_BACKEND`` environment variable picks one:

* unset or ``auto``: numba when importable, numpy otherwise;
* ``numba``: require numba (falls back with a warning if missing);
* ``numpy``: force the pure-numpy path.

Both paths produce the same values to float rounding; see
``benchmarks/compare_backends.py`` for the speed difference.
"""

from __future__ import annotations

import os
import warnings

from . import numpy_impl

_choice = os.environ.get("WAVESAL_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    warnings.warn(f"unknown WAVESAL_BACKEND={_choice!r}; using 'auto'", stacklevel=1)
    _choice = "auto"

_impl = numpy_impl
if _choice in ("auto", "numba"):
    try:
        from . import numba_impl

        _impl = numba_impl
    except ImportError:
        if _choice == "numba":
            warnings.warn("WAVESAL_BACKEND=numba but numba is not importable; using numpy",
                          stacklevel=1)

filter_down_axis0 = _impl.filter_down_axis0
pss_scan = _impl.pss_scan


def backend_name() -> str:
    return _impl.NAME
