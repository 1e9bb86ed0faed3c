"""Kernel backend selection.

The compiled extension is used when it imports; setting ``BITCOV_PURE_PYTHON=1``
forces the numpy fallback (used by the benchmark and the cross-backend tests).
"""

import os

from bitcov import _kernels_py

if os.environ.get("BITCOV_PURE_PYTHON", "") not in ("", "0"):
    kernels = _kernels_py
    NAME = "python"
else:
    try:
        from bitcov import _kernels as kernels  # type: ignore[attr-defined]
        NAME = "cython"
    except ImportError:
        kernels = _kernels_py
        NAME = "python"

jacobi_eigh = kernels.jacobi_eigh
quantize_codes = kernels.quantize_codes
pack_codes = kernels.pack_codes
unpack_codes = kernels.unpack_codes
