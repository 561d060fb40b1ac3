"""Backend selection for the DBM kernels.

The compiled numba kernels are used unless ``TADIAG_NUMBA=0`` is set in the
environment or numba cannot be imported; the vectorised numpy path is the
fallback. Both expose ``close``, ``tighten``, ``is_le`` and ``alu_le``.
"""

from __future__ import annotations

import os

from . import _kernels_numpy

BACKEND = "numpy"
close = _kernels_numpy.close
tighten = _kernels_numpy.tighten
is_le = _kernels_numpy.is_le
alu_le = _kernels_numpy.alu_le

if os.environ.get("TADIAG_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off"):
    try:
        from . import _kernels_numba
    except ImportError:  # pragma: no cover - numba missing
        pass
    else:
        BACKEND = "numba"
        close = _kernels_numba.close
        tighten = _kernels_numba.tighten
        is_le = _kernels_numba.is_le
        alu_le = _kernels_numba.alu_le


def implementations() -> dict[str, object]:
    """Map backend name to its kernel module, for cross-checks and benchmarks."""
    impls: dict[str, object] = {"numpy": _kernels_numpy}
    try:
        from . import _kernels_numba
    except ImportError:  # pragma: no cover
        return impls
    impls["numba"] = _kernels_numba
    return impls
