"""Interval kernels behind the engine's snapshot, timeslice, coalesce and
non-overlap operations.

The compiled extension is used when it was built; otherwise, or when
``LTRM_PURE_PYTHON=1`` is set, the pure-Python module is used.  Both accept
``array('q')`` inputs; :func:`int_array` builds one.
"""

from __future__ import annotations

import os
from array import array

from . import _pykernels

BACKEND = "python"
if os.environ.get("LTRM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

contains_point = _impl.contains_point
overlapping = _impl.overlapping
overlap_pairs = _impl.overlap_pairs
coalesce_runs = _impl.coalesce_runs


def int_array(values=()) -> array:
    return array("q", values)


__all__ = [
    "BACKEND",
    "contains_point",
    "overlapping",
    "overlap_pairs",
    "coalesce_runs",
    "int_array",
]
