"""Backend selection for the numeric kernels.

Kernels are written once in scalar ``math`` style.  When numba is importable
and ``PULSEPATH_DISABLE_JIT`` is unset (or ``0``), they are compiled with
``numba.njit``; otherwise the plain Python functions run unchanged and the
array helpers take their vectorised numpy branch.
"""
import os

_FLAG = os.environ.get("PULSEPATH_DISABLE_JIT", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None

USE_NUMBA = numba is not None and _FLAG in ("", "0", "false", "no")
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(fn):
    """Compile ``fn`` with numba when enabled, else return it untouched."""
    if USE_NUMBA:
        return numba.njit(cache=True, error_model="numpy", nogil=True)(fn)
    return fn


def python_impl(fn):
    """Return the uncompiled Python function behind a (possibly) jitted kernel."""
    return getattr(fn, "py_func", fn)
