"""Kernel backend selection.

The compiled extension is used when it imports; set ``HELMCAUCHY_PURE_PYTHON=1``
to force the numpy fallback. ``BACKEND`` names the active one.
"""
import os

from . import _kernels_py

if os.environ.get("HELMCAUCHY_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

shc = _impl.shc
chc = _impl.chc
shc_weighted_sum = _impl.shc_weighted_sum
volterra_march = _impl.volterra_march
SERIES_THRESHOLD = _kernels_py.SERIES_THRESHOLD
