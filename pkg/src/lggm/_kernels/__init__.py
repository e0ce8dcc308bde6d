"""Kernel backend selection.

The compiled Cython core is preferred when present; the pure-numpy
fallback implements identical semantics. ``LGGM_BACKEND`` forces the
choice: ``auto`` (default), ``cython``, or ``python``.
"""

import os

from ._fallback import P_FLOOR, projector_rows  # noqa: F401  (shared helpers)

_requested = os.environ.get("LGGM_BACKEND", "auto").lower()

if _requested not in ("auto", "cython", "python"):
    raise ImportError(f"LGGM_BACKEND must be auto, cython or python, got {_requested!r}")

if _requested in ("auto", "cython"):
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from . import _fallback as _impl
        BACKEND = "python"
else:
    from . import _fallback as _impl
    BACKEND = "python"

collapse = _impl.collapse
cut_lambda_max = _impl.cut_lambda_max
avg_ggm_objective = _impl.avg_ggm_objective
grid_scan = _impl.grid_scan
apply_ising = _impl.apply_ising
apply_xxz = _impl.apply_xxz
