"""Zones as canonical difference-bound matrices.

Entry ``(i, j)`` of a DBM bounds ``x_i - x_j`` (row/column 0 is the zero
clock). Public operations take and return :class:`Dbm` values that are
canonical and non-empty; the empty zone is ``None``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import kernels
from ._bounds import INF, LE_ZERO, add, check_const, decode, encode
from .model import Constraint, UpdateMap


class Dbm:
    """Immutable canonical non-empty zone over ``dim - 1`` clocks."""

    __slots__ = ("m", "_key")

    def __init__(self, m: np.ndarray):
        m.setflags(write=False)
        self.m = m
        self._key = None

    @property
    def dim(self) -> int:
        return self.m.shape[0]

    @property
    def nclocks(self) -> int:
        return self.m.shape[0] - 1

    def key(self) -> bytes:
        if self._key is None:
            self._key = self.m.tobytes()
        return self._key

    def __eq__(self, other):
        return isinstance(other, Dbm) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Dbm({'; '.join(constraint_lines(self))})"

    def __contains__(self, v) -> bool:
        return member(self, v)

    def entry(self, i: int, j: int) -> int:
        return int(self.m[i, j])

    def copy_array(self) -> np.ndarray:
        return np.array(self.m, dtype=np.int64, order="C")


def canonicalize(m: np.ndarray) -> Dbm | None:
    """Shortest-path closure of a raw bound matrix (copied), or None if empty."""
    a = np.array(m, dtype=np.int64, order="C")
    n = a.shape[0]
    # a zone is a set of non-negative valuations
    a[0, :] = np.minimum(a[0, :], LE_ZERO)
    np.fill_diagonal(a, np.minimum(np.diagonal(a), LE_ZERO))
    if not kernels.close(a):
        return None
    if n and a[0, 0] != LE_ZERO:
        return None
    return Dbm(a)


def unconstrained(nclocks: int) -> Dbm:
    """All non-negative valuations."""
    n = nclocks + 1
    a = np.full((n, n), INF, dtype=np.int64)
    np.fill_diagonal(a, LE_ZERO)
    a[0, :] = LE_ZERO
    return Dbm(a)


def initial_zone(nclocks: int) -> Dbm:
    """Time successors of the zero valuation: all clocks equal and >= 0."""
    n = nclocks + 1
    a = np.full((n, n), LE_ZERO, dtype=np.int64)
    a[1:, 0] = INF
    return Dbm(a)


def point_zone(v: Sequence) -> Dbm:
    """The singleton zone {v}; coordinates must be integers."""
    n = len(v)
    a = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            d = v[i] - v[j]
            if d != int(d):
                raise ValueError("point zones need integer coordinates")
            a[i, j] = encode(False, int(d))
    return Dbm(a)


def from_constraints(nclocks: int, constraints: Iterable[Constraint | tuple[int, int, int]]) -> Dbm | None:
    """Zone of all non-negative valuations satisfying the given constraints."""
    a = unconstrained(nclocks).copy_array()
    for c in constraints:
        if isinstance(c, Constraint):
            i, j, b = c.lhs, c.rhs, c.raw
        else:
            i, j, b = c
        if b < a[i, j]:
            a[i, j] = b
    return canonicalize(a)


def is_empty(z: Dbm | None) -> bool:
    return z is None


def elapse(z: Dbm | None) -> Dbm | None:
    if z is None:
        return None
    a = z.copy_array()
    a[1:, 0] = INF
    return Dbm(a)


def intersect_raw(z: Dbm | None, i: int, j: int, b: int) -> Dbm | None:
    if z is None:
        return None
    if b >= z.m[i, j]:
        return z
    a = z.copy_array()
    if not kernels.tighten(a, i, j, b):
        return None
    return Dbm(a)


def intersect(z: Dbm | None, phi: Constraint) -> Dbm | None:
    """Z and phi, re-closed in quadratic time."""
    return intersect_raw(z, phi.lhs, phi.rhs, phi.raw)


def intersect_all(z: Dbm | None, constraints: Iterable[Constraint]) -> Dbm | None:
    if z is None:
        return None
    a = None
    for c in constraints:
        src = z.m if a is None else a
        b = c.raw
        if b >= src[c.lhs, c.rhs]:
            continue
        if a is None:
            a = z.copy_array()
        if not kernels.tighten(a, c.lhs, c.rhs, b):
            return None
    return z if a is None else Dbm(a)


def negate_constraint(phi: Constraint) -> Constraint:
    """Complement half-plane: not(x - y <| c) is (y - x <|' -c) with strictness flipped."""
    return phi.negate()


def includes(big: Dbm | None, small: Dbm | None) -> bool:
    """True iff ``small`` is a subset of ``big``."""
    if small is None:
        return True
    if big is None:
        return False
    return kernels.is_le(small.m, big.m)


def member(z: Dbm | None, v: Sequence) -> bool:
    if z is None:
        return False
    n = z.dim
    if len(v) != n or v[0] != 0:
        raise ValueError("valuation must have slot 0 equal to 0 and one slot per clock")
    m = z.m
    for i in range(n):
        for j in range(n):
            b = int(m[i, j])
            if b >= INF:
                continue
            strict, c = decode(b)
            d = v[i] - v[j]
            if (strict and not d < c) or (not strict and not d <= c):
                return False
    return True


def reset(z: Dbm | None, clocks: Iterable[int]) -> Dbm | None:
    return apply_update_zone(z, UpdateMap.reset(clocks))


def _sequential_safe(up: UpdateMap) -> bool:
    # x := y + d with y written elsewhere needs the pre-value of y.
    written = up.written
    return all(src == 0 or src == x or src not in written for x, src, _ in up.items)


def apply_update_zone(z: Dbm | None, up: UpdateMap) -> Dbm | None:
    """Exact image ``{up(v) | v in Z, up(v) >= 0}``."""
    if z is None:
        return None
    if not up:
        return z
    if _sequential_safe(up):
        return _update_in_place(z, up)
    return _update_aux(z, up)


def _update_in_place(z: Dbm, up: UpdateMap) -> Dbm | None:
    a = z.copy_array()
    n = a.shape[0]
    shifted = []
    for x, src, off in up.items:
        check_const(off)
        if src == 0:
            # x := off
            up_b = encode(False, off)
            lo_b = encode(False, -off)
            for j in range(n):
                a[x, j] = add(up_b, int(a[0, j]))
                a[j, x] = add(int(a[j, 0]), lo_b)
            a[x, x] = LE_ZERO
        elif src == x:
            shifted.append(x)
            up_b = encode(False, off)
            lo_b = encode(False, -off)
            for j in range(n):
                if j == x:
                    continue
                a[x, j] = add(int(a[x, j]), up_b)
                a[j, x] = add(int(a[j, x]), lo_b)
        else:
            up_b = encode(False, off)
            lo_b = encode(False, -off)
            for j in range(n):
                a[x, j] = add(int(a[src, j]), up_b)
                a[j, x] = add(int(a[j, src]), lo_b)
            a[x, x] = LE_ZERO
            a[x, src] = up_b
            a[src, x] = lo_b
    # shifts can push a clock below zero: keep only images that are valuations
    for x, src, off in up.items:
        if src != 0 and off < 0:
            if not kernels.tighten(a, 0, x, LE_ZERO):
                return None
    return Dbm(a)


def _update_aux(z: Dbm, up: UpdateMap) -> Dbm | None:
    # Rows 0..n-1 hold pre-update clocks, rows n..2n-2 the post-update copies.
    n = z.dim
    k = n - 1
    big = np.full((n + k, n + k), INF, dtype=np.int64)
    np.fill_diagonal(big, LE_ZERO)
    big[:n, :n] = z.m
    post = lambda x: n + x - 1  # noqa: E731
    for x in range(1, n):
        src, off = up.rhs(x)
        px = post(x)
        big[px, src] = encode(False, off)
        big[src, px] = encode(False, -off)
    for x in range(1, n):
        big[0, post(x)] = min(big[0, post(x)], LE_ZERO)
    if not kernels.close(big):
        return None
    idx = [0] + [post(x) for x in range(1, n)]
    a = np.ascontiguousarray(big[np.ix_(idx, idx)])
    return Dbm(a)


def constraint_lines(z: Dbm | None, names: Sequence[str] | None = None) -> list[str]:
    """Debug serialisation: one ``xi - xj <|<= c`` line per finite entry, row-major."""
    if z is None:
        return ["false"]
    n = z.dim
    if names is None:
        names = [f"x{i}" for i in range(1, n)]
    label = ["0", *names]
    out = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            b = int(z.m[i, j])
            if b >= INF:
                continue
            strict, c = decode(b)
            out.append(f"{label[i]} - {label[j]} {'<' if strict else '<='} {c}")
    return out


def to_text(z: Dbm | None, names: Sequence[str] | None = None) -> str:
    return "\n".join(constraint_lines(z, names)) + "\n"


def is_canonical(m: np.ndarray) -> bool:
    n = m.shape[0]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if add(int(m[i, k]), int(m[k, j])) < m[i, j]:
                    return False
    return True
