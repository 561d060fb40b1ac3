"""Integer encoding of DBM bounds.

A bound ``(strict, c)`` is stored as ``2*c + (0 if strict else 1)`` so that the
natural integer order is the bound order: value first, then ``<`` below
``<=`` at equal value. The sum of two encoded bounds ``a`` and ``b`` is
``a + b - ((a | b) & 1)``.
"""

from __future__ import annotations

INF = 1 << 61
LE_ZERO = 1
LT_ZERO = 0

# Constants stay inside a signed 32-bit window; sums of a few encoded bounds
# then fit comfortably in int64.
MAX_CONST = (1 << 30) - 1

# Sentinel for -infinity in LU bound arrays (L and U map into N or -inf).
LU_NEG = -1


class BoundOverflowError(OverflowError):
    """A constant left the supported 32-bit window."""


def check_const(c: int) -> int:
    if not -MAX_CONST <= c <= MAX_CONST:
        raise BoundOverflowError(f"constant {c} outside [-{MAX_CONST}, {MAX_CONST}]")
    return c


def encode(strict: bool, c: int) -> int:
    check_const(c)
    return 2 * c + (0 if strict else 1)


def decode(raw: int) -> tuple[bool, int]:
    """Return ``(strict, value)``; raises for the infinite bound."""
    if raw >= INF:
        raise ValueError("infinite bound has no value")
    return (raw & 1) == 0, raw >> 1


def add(a: int, b: int) -> int:
    if a >= INF or b >= INF:
        return INF
    return a + b - ((a | b) & 1)


def fmt(raw: int) -> str:
    if raw >= INF:
        return "<inf"
    strict, c = decode(raw)
    return f"{'<' if strict else '<='}{c}"
