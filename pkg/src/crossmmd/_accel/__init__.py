"""Backend selection for the quadratic-time inner loops.

The numba backend is used when numba imports cleanly; setting the
environment variable ``CROSSMMD_NO_NUMBA=1`` before import forces the
pure-numpy fallback. ``benchmarks/benchmark_backends.py`` compares the two.
"""

from __future__ import annotations

import os

GAUSSIAN, LAPLACE, POLYNOMIAL = 0, 1, 2

_DISABLED = os.environ.get("CROSSMMD_NO_NUMBA", "").strip().lower() in (
    "1", "true", "yes", "on",
)

if not _DISABLED:
    try:
        from . import _numba_impl as _impl
        BACKEND = "numba"
    except ImportError:
        from . import _numpy_impl as _impl
        BACKEND = "numpy"
else:
    from . import _numpy_impl as _impl
    BACKEND = "numpy"

sqdist_matrix = _impl.sqdist_matrix
sqdist_condensed = _impl.sqdist_condensed
sqdist_both = _impl.sqdist_both
gram_dist_kernel = _impl.gram_dist_kernel
gram_from_sqdist = _impl.gram_from_sqdist
mmd_direct = _impl.mmd_direct
mmd_contiguous = _impl.mmd_contiguous
mmd_from_labels = _impl.mmd_from_labels
perm_mmd_stats = _impl.perm_mmd_stats


def backend_name() -> str:
    """Active backend: ``"numba"`` or ``"numpy"``."""
    return BACKEND
