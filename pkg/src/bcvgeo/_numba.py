"""Optional numba acceleration with a pure-Python fallback.

Setting the environment variable ``BCV_DISABLE_NUMBA=1`` forces the fallback
even when numba is installed.  The flag is consulted per call so tests and
benchmarks can flip it at runtime without reimporting.
"""

from __future__ import annotations

import os

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None
    HAVE_NUMBA = False

ENV_FLAG = "BCV_DISABLE_NUMBA"


def numba_disabled() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes"}


def numba_active() -> bool:
    """True when jitted kernels should be used for this call."""
    return HAVE_NUMBA and not numba_disabled()


def jit_twin(py_func):
    """Jitted twin of ``py_func``, or None when numba is unavailable."""
    if not HAVE_NUMBA:
        return None
    return njit(cache=True)(py_func)
