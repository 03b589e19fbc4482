"""JIT switch for the numeric kernels.

Kernels are written once in the numba-compatible subset of Python. When
``KNESERLAB_JIT`` is set to ``0``/``false``/``off`` (or numba is missing) the
decorator is the identity and every kernel runs as plain Python over numpy
arrays; kernels that vectorize naturally also ship a numpy twin that is used
on that path.
"""

from __future__ import annotations

import os

_OFF = {"0", "false", "no", "off"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_JIT = numba is not None and os.environ.get("KNESERLAB_JIT", "1").strip().lower() not in _OFF


def njit(fn):
    """Compile ``fn`` with numba when enabled, else return it unchanged."""
    if USE_JIT:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def python_impl(fn):
    """The interpreted body of a kernel, whichever path is active."""
    return getattr(fn, "py_func", fn)


def backend() -> str:
    return "numba" if USE_JIT else "numpy"
