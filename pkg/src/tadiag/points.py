"""Exact rational points of difference-constraint systems.

Used to extract concrete witnesses: a system is closed once, then variables
are pinned one at a time, each pin being a pair of single-edge tightenings.
Entries are ``None`` (unbounded) or ``(value, strict)`` with Fraction values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from ._bounds import INF, decode


def _add(a, b):
    if a is None or b is None:
        return None
    return (a[0] + b[0], a[1] or b[1])


def _lt(a, b) -> bool:
    """a strictly tighter than b."""
    if a is None:
        return False
    if b is None:
        return True
    return a[0] < b[0] or (a[0] == b[0] and a[1] and not b[1])


def _negative(e) -> bool:
    return e is not None and (e[0] < 0 or (e[0] == 0 and e[1]))


class RationalSystem:
    """Closed difference system over variables 0..n-1 (0 is the reference)."""

    def __init__(self, m: list[list]):
        self.m = m

    @classmethod
    def from_raw(cls, a) -> "RationalSystem":
        n = len(a)
        m = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                b = int(a[i][j])
                if b < INF:
                    strict, c = decode(b)
                    m[i][j] = (Fraction(c), strict)
        for i in range(n):
            if m[i][i] is None:
                m[i][i] = (Fraction(0), False)
        return cls(m)

    @classmethod
    def unconstrained(cls, n: int) -> "RationalSystem":
        m = [[None] * n for _ in range(n)]
        for i in range(n):
            m[i][i] = (Fraction(0), False)
        return cls(m)

    def __len__(self):
        return len(self.m)

    def close(self) -> bool:
        m = self.m
        n = len(m)
        for k in range(n):
            mk = m[k]
            for i in range(n):
                mik = m[i][k]
                if mik is None:
                    continue
                mi = m[i]
                for j in range(n):
                    s = _add(mik, mk[j])
                    if _lt(s, mi[j]):
                        mi[j] = s
        return not any(_negative(m[i][i]) for i in range(n))

    def tighten(self, i: int, j: int, e) -> bool:
        """Add ``v_i - v_j`` bounded by ``e`` to a closed system, in place."""
        m = self.m
        if _negative(_add(m[j][i], e)):
            return False
        if not _lt(e, m[i][j]):
            return True
        n = len(m)
        col = [_add(m[p][i], e) for p in range(n)]
        rowj = list(m[j])
        for p in range(n):
            cp = col[p]
            if cp is None:
                continue
            mp = m[p]
            for q in range(n):
                s = _add(cp, rowj[q])
                if _lt(s, mp[q]):
                    mp[q] = s
        return True

    def interval(self, x: int):
        """(lo, lo_strict, hi, hi_strict) for ``v_x - v_0``; hi None when unbounded."""
        up = self.m[x][0]
        down = self.m[0][x]
        lo, lo_strict = (-down[0], down[1]) if down is not None else (None, False)
        hi, hi_strict = (up[0], up[1]) if up is not None else (None, False)
        return lo, lo_strict, hi, hi_strict

    def pin(self, x: int, val: Fraction) -> bool:
        return self.tighten(x, 0, (val, False)) and self.tighten(0, x, (-val, False))


def least_choice(lo, lo_strict, hi, hi_strict) -> Fraction:
    if lo is None:
        lo, lo_strict = Fraction(0), False
    if not lo_strict:
        return Fraction(lo)
    if hi is None:
        return Fraction(lo) + Fraction(1, 2)
    return (Fraction(lo) + Fraction(hi)) / 2


def solve(system: RationalSystem, order: Sequence[int] | None = None,
          choose: Callable = least_choice) -> list[Fraction] | None:
    """Pin variables in ``order`` (default 1..n-1); values are relative to v_0 = 0."""
    n = len(system)
    if not system.close():
        return None
    vals = [Fraction(0)] * n
    for x in order if order is not None else range(1, n):
        lo, ls, hi, hs = system.interval(x)
        val = choose(lo, ls, hi, hs)
        if not system.pin(x, val):
            raise AssertionError("pinning left the feasible set")
        vals[x] = val
    return vals


def zone_point(z, choose: Callable = least_choice) -> tuple:
    """A rational valuation inside the (non-empty) zone ``z``."""
    system = RationalSystem.from_raw(z.m.tolist())
    vals = solve(system, choose=choose)
    if vals is None:
        raise ValueError("empty zone")
    return tuple(vals)
