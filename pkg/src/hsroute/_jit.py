"""Backend switch for the hot kernels.

Set ``HSROUTE_DISABLE_NUMBA=1`` before import to force the pure-numpy path.
The flag is read once; change it in a fresh interpreter.
"""
import os

_DISABLE = os.environ.get("HSROUTE_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLE:
        raise ImportError
    import numba as _numba
    USE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _numba = None
    USE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity otherwise."""
    if USE_NUMBA:
        kwargs.setdefault("cache", True)
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def deco(fn):
        return fn
    return deco


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
