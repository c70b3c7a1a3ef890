"""Demodulation kernel dispatch: compiled core when available, NumPy otherwise.

The compiled extension (``admlink._kernels``, built from Cython at install
time) and the pure-NumPy module (``admlink._kernels_py``) implement the same
three kernels bit-exactly; this module picks one at import time.

Set the environment variable ``ADMLINK_PURE_PYTHON=1`` before import to force
the NumPy fallback even when the compiled core is installed (used by the
parity tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py

HAVE_COMPILED = False
if os.environ.get("ADMLINK_PURE_PYTHON") != "1":
    try:
        from . import _kernels  # compiled extension

        HAVE_COMPILED = True
    except ImportError:  # pragma: no cover - depends on build environment
        HAVE_COMPILED = False

_impl = _kernels if HAVE_COMPILED else _kernels_py

#: Name of the active backend, for logging and the benchmark.
BACKEND = "compiled" if HAVE_COMPILED else "numpy"

dpsk_rule = _impl.dpsk_rule
dapsk_rule = _impl.dapsk_rule
dapsk_simple = _impl.dapsk_simple

__all__ = [
    "dpsk_rule",
    "dapsk_rule",
    "dapsk_simple",
    "HAVE_COMPILED",
    "BACKEND",
]
