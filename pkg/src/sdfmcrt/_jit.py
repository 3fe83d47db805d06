"""numba shim.

Set ``SDFMCRT_DISABLE_NUMBA=1`` before import to run every kernel as plain
Python/numpy. The flag is read once, at import time.
"""
import os

_flag = os.environ.get("SDFMCRT_DISABLE_NUMBA", "").strip().lower()
DISABLE_NUMBA = _flag not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

NUMBA_ENABLED = numba is not None and not DISABLE_NUMBA


def njit(*args, **kwargs):
    """``numba.njit(cache=True, nogil=True)`` or a no-op decorator."""
    if not NUMBA_ENABLED:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    return numba.njit(*args, **kwargs)
