"""Kernel backend selection.

The hot geometric loops (farthest-point selection, nearest-cell
assignment, edge scans, kernel smoothing) exist twice: a Cython extension
(``laplacenet._kernels``) and a pure-NumPy fallback
(``laplacenet._kernels_py``).  The compiled one is used when importable;
set ``LAPLACENET_PURE=1`` to force the fallback (used by the benchmark
and the backend-equivalence tests).
"""

import os

if os.environ.get("LAPLACENET_PURE"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

COMPILED: bool = bool(getattr(kernels, "COMPILED", False))
