"""Optional numba acceleration.

The hot kernels in :mod:`wpb._kernels` are written twice: once as explicit
loops compiled with ``numba.njit`` and once as broadcast numpy expressions.
Which one the package uses is decided at import time:

* ``WPB_DISABLE_NUMBA=1`` (or ``true``/``yes``/``on``) forces numpy;
* otherwise numba is used when it can be imported.
"""
import os

_FLAG = "WPB_DISABLE_NUMBA"


def _disabled_by_env():
    return os.environ.get(_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled_by_env()


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise a no-op decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)

    def wrapper(f):
        return f

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return wrapper


def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"
