"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported.  Setting ``ARITHWAVE_PURE=1`` forces the fallback.
"""
import os

from . import _pykernels as python_backend

try:
    if os.environ.get("ARITHWAVE_PURE", "") not in ("", "0"):
        raise ImportError("pure backend requested")
    from . import _ckernels as compiled_backend
except ImportError:
    compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

census_scan = _impl.census_scan
pair_accumulate = _impl.pair_accumulate
pair_gram = _impl.pair_gram
tet_surface_area = _impl.tet_surface_area
tri_contour_length = _impl.tri_contour_length
tet_band_integral = _impl.tet_band_integral
tri_band_integral = _impl.tri_band_integral


def backends():
    """Available backend modules keyed by name."""
    out = {"python": python_backend}
    if compiled_backend is not None:
        out["cython"] = compiled_backend
    return out
