"""Backend selection for the hot kernels.

The compiled Cython extension is used when it imports; otherwise the
pure-Python module is used. Setting ``JOINTSPEC_PURE_PYTHON=1`` forces the
fallback. ``BACKEND`` names the active implementation.
"""
import os

from . import _kernels_py

try:
    if os.environ.get("JOINTSPEC_PURE_PYTHON"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

blade_sign = _impl.blade_sign
materialize = _impl.materialize
lap_solve = _impl.lap_solve
perfect_matching = _impl.perfect_matching


def backends():
    """Mapping of every importable backend name to its module."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels

        found["cython"] = _kernels
    except ImportError:
        pass
    return found
