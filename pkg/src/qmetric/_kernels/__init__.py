"""Backend selection for the batched spectral kernels.

The compiled extension is preferred when present; the numpy implementation
is the always-available fallback.  ``QMETRIC_KERNELS`` overrides the choice:
``compiled`` (fail if missing), ``python``, or ``auto`` (default).
"""

from __future__ import annotations

import os

from . import _numpy

_choice = os.environ.get("QMETRIC_KERNELS", "auto").lower()

if _choice not in {"auto", "compiled", "python"}:
    raise ValueError(f"QMETRIC_KERNELS must be auto|compiled|python, got {_choice!r}")

if _choice == "python":
    _impl = _numpy
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = _numpy

sv_max_batch = _impl.sv_max_batch
sv_max_le_batch = _impl.sv_max_le_batch

if _impl is _numpy:
    herm_eig_bounds_batch = _numpy.herm_eig_bounds_batch
else:
    def herm_eig_bounds_batch(mats):
        # vectorized closed form beats the compiled per-element loop at k <= 2
        import numpy as _np

        if _np.asarray(mats).shape[-1] <= 2:
            return _numpy.herm_eig_bounds_batch(mats)
        return _impl.herm_eig_bounds_batch(mats)

BACKEND = "compiled" if _impl is not _numpy else "numpy"


def backend_name() -> str:
    """Name of the kernel backend in use ("compiled" or "numpy")."""
    return BACKEND
