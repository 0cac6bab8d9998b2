"""
Numba shim.

Hot kernels are written twice: a numba ``@njit`` loop version and a plain
numpy version. ``GREENEXP_DISABLE_NUMBA=1`` forces the numpy path; the numpy
path is also used when numba cannot be imported.
"""
import os
import warnings

_FLAG = "GREENEXP_DISABLE_NUMBA"


def _env_disabled():
    return os.environ.get(_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


try:
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False
    prange = range

    def njit(*args, **kw):
        if len(args) == 1 and callable(args[0]) and not kw:
            return args[0]
        return lambda f: f

    if not _env_disabled():
        warnings.warn("numba is not installed - using the numpy kernels")


USE_NUMBA = HAVE_NUMBA and not _env_disabled()

__all__ = ["HAVE_NUMBA", "USE_NUMBA", "njit", "prange"]
