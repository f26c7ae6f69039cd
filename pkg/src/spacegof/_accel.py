"""Select the compiled kernels when available, else the numpy fallback.

Set ``SPACEGOF_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("SPACEGOF_PURE_PYTHON"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

pair_power_sums = _impl.pair_power_sums
sq_diff_sums = _impl.sq_diff_sums
abs_diff_sums_sorted = _impl.abs_diff_sums_sorted
