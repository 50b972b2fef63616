"""Kernel backend selection.

The hot loops (grayscale erosion/dilation, geodesic reconstruction, and
max-flow) exist twice: a Cython extension built at install time and a
pure-Python/numpy fallback. The compiled backend is picked at import when
available; set MIST_PURE_PYTHON=1 to force the fallback (used by the
cross-backend tests and `mist bench`).
"""

import os

from . import _maxflow_py, _morph_py

_FORCE_PURE = os.environ.get("MIST_PURE_PYTHON", "") not in ("", "0")

if not _FORCE_PURE:
    try:
        from . import _maxflow_c, _morph_c
        BACKEND = "compiled"
    except ImportError:
        BACKEND = "python"
else:
    BACKEND = "python"

if BACKEND == "compiled":
    erode_gray = _morph_c.erode_gray
    dilate_gray = _morph_c.dilate_gray
    reconstruct_dilation = _morph_c.reconstruct_dilation
    maxflow = _maxflow_c.maxflow
else:
    erode_gray = _morph_py.erode_gray
    dilate_gray = _morph_py.dilate_gray
    reconstruct_dilation = _morph_py.reconstruct_dilation
    maxflow = _maxflow_py.maxflow

PURE_BACKEND = {
    "erode_gray": _morph_py.erode_gray,
    "dilate_gray": _morph_py.dilate_gray,
    "reconstruct_dilation": _morph_py.reconstruct_dilation,
    "maxflow": _maxflow_py.maxflow,
}


def compiled_backend():
    """The compiled kernel table, or None when the extension is absent."""
    try:
        from . import _maxflow_c, _morph_c
    except ImportError:
        return None
    return {
        "erode_gray": _morph_c.erode_gray,
        "dilate_gray": _morph_c.dilate_gray,
        "reconstruct_dilation": _morph_c.reconstruct_dilation,
        "maxflow": _maxflow_c.maxflow,
    }
