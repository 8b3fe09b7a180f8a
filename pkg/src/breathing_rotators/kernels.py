"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``BREATHING_ROTATORS_PURE_PYTHON`` is set to a
non-empty value other than ``0``, the pure-Python module is used.
"""

import os

from . import _kernels_py

_force_py = os.environ.get("BREATHING_ROTATORS_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_py:
        raise ImportError("pure Python backend requested")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

kinematic_jet = _impl.kinematic_jet
block_coefficients = _impl.block_coefficients
hessian_dense = _impl.hessian_dense
gauge_scalars = _kernels_py.gauge_scalars

__all__ = ["BACKEND", "kinematic_jet", "block_coefficients", "hessian_dense", "gauge_scalars"]
