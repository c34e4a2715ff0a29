"""Kernel backend selection.

The GMP extension is used when it imports; setting TRUNCWEIL_BACKEND=python
forces the pure-Python kernels.  Both return identical integers.
"""

import os

from . import _pykernels

_forced = os.environ.get("TRUNCWEIL_BACKEND", "").strip().lower()
kernels = _pykernels
if _forced != "python":
    try:
        from . import _ckernels as kernels
    except ImportError:
        if _forced in ("c", "cython"):
            raise
        kernels = _pykernels

BACKEND = kernels.NAME
pole_sums = kernels.pole_sums
jacobi_eigh = kernels.jacobi_eigh
