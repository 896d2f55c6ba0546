"""Optional numba acceleration.

Set ``COSMOWAVE_DISABLE_NUMBA=1`` to run every kernel on its pure numpy /
pure Python path. The flag is read once, at import time.
"""

import functools
import os

_FLAG = os.environ.get("COSMOWAVE_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(func=None, **kwargs):
    """``numba.njit(cache=True, nogil=True)`` when enabled, identity otherwise."""
    if func is None:
        return functools.partial(njit, **kwargs)
    if not USE_NUMBA:
        return func
    opts = {"cache": True, "nogil": True}
    opts.update(kwargs)
    return numba.njit(**opts)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
