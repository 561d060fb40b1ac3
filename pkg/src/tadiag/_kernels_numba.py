"""Loop-level DBM kernels compiled with numba (default backend)."""

from __future__ import annotations

from numba import njit

from ._bounds import INF, LE_ZERO


@njit(cache=True, inline="always")
def _add(a, b):
    if a >= INF or b >= INF:
        return INF
    return a + b - ((a | b) & 1)


@njit(cache=True)
def close(m):
    n = m.shape[0]
    for k in range(n):
        for i in range(n):
            mik = m[i, k]
            if mik >= INF:
                continue
            for j in range(n):
                s = _add(mik, m[k, j])
                if s < m[i, j]:
                    m[i, j] = s
        if m[k, k] < LE_ZERO:
            return False
    for i in range(n):
        if m[i, i] < LE_ZERO:
            return False
    return True


@njit(cache=True)
def tighten(m, i, j, b):
    if _add(m[j, i], b) < LE_ZERO:
        return False
    if b >= m[i, j]:
        return True
    n = m.shape[0]
    for p in range(n):
        pi = _add(m[p, i], b)
        if pi >= INF:
            continue
        for q in range(n):
            s = _add(pi, m[j, q])
            if s < m[p, q]:
                m[p, q] = s
    return True


@njit(cache=True)
def is_le(a, b):
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            if a[i, j] > b[i, j]:
                return False
    return True


@njit(cache=True)
def alu_le(a, b, lo, up):
    n = a.shape[0]
    for x in range(n):
        if x != 0 and (up[x] < 0 or a[0, x] < -2 * up[x] + 1):
            continue
        a0x = a[0, x]
        for y in range(n):
            if y == x:
                continue
            byx = b[y, x]
            if byx >= a[y, x]:
                continue
            if y != 0 and (lo[y] < 0 or _add(byx, -2 * lo[y]) >= a0x):
                continue
            return False
    return True
