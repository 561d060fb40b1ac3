"""Vectorised numpy implementations of the DBM kernels.

Selected when numba is unavailable or ``TADIAG_NUMBA=0``. Same contracts as
the compiled variants in ``_kernels_numba``: every function takes C-contiguous
int64 square matrices of encoded bounds and mutates only where stated.
"""

from __future__ import annotations

import numpy as np

from ._bounds import INF, LE_ZERO


def _add(a, b):
    s = a + b - ((a | b) & 1)
    return np.where((a >= INF) | (b >= INF), INF, s)


def close(m: np.ndarray) -> bool:
    """All-pairs shortest-path closure in place; False on a negative cycle."""
    n = m.shape[0]
    for k in range(n):
        np.minimum(m, _add(m[:, k : k + 1], m[k : k + 1, :]), out=m)
        if m[k, k] < LE_ZERO:
            return False
    return bool(np.all(np.diagonal(m) >= LE_ZERO))


def tighten(m: np.ndarray, i: int, j: int, b: int) -> bool:
    """Intersect canonical ``m`` with ``x_i - x_j`` bounded by ``b``, in place."""
    back = m[j, i]
    if back < INF and b < INF and back + b - ((back | b) & 1) < LE_ZERO:
        return False
    if b >= m[i, j]:
        return True
    via = _add(m[:, i : i + 1], np.int64(b))
    np.minimum(m, _add(via, m[j : j + 1, :]), out=m)
    return True


def is_le(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(a <= b))


def alu_le(a: np.ndarray, b: np.ndarray, lo: np.ndarray, up: np.ndarray) -> bool:
    """Z (``a``) is LU-simulated by Z' (``b``); both canonical and non-empty.

    Fails iff some ordered pair (y, x), x != y, satisfies
    ``Z'[y,x] < Z[y,x]``, ``x == 0 or Z[0,x] >= (<=, -U[x])`` and
    ``y == 0 or Z'[y,x] + (<, -L[y]) < Z[0,x]``.
    """
    n = a.shape[0]
    row0 = a[0, :]
    c1 = (up >= 0) & (row0 >= -2 * up + 1)
    c1[0] = True
    c2 = b < a
    np.fill_diagonal(c2, False)
    shifted = _add(b, (-2 * lo)[:, None])
    c3 = (lo[:, None] >= 0) & (shifted < row0[None, :])
    c3[0, :] = True
    bad = c2 & c3 & c1[None, :]
    return not bool(bad.any()) if n else True
