"""Timed automata with diagonal guards and general clock updates.

Clocks are numbered from 1; index 0 is the implicit zero clock, which only
appears inside constraints. Valuations are tuples whose slot 0 is always 0,
so ``v[i]`` reads clock ``i`` and ``v[0]`` reads the zero clock.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from ._bounds import check_const, encode


class ModelError(ValueError):
    """Structural problem with an automaton or network."""


@dataclass(frozen=True, order=True)
class Constraint:
    """Atomic constraint ``x_lhs - x_rhs < bound`` (or ``<=`` when not strict).

    ``x <| c`` is ``Constraint(x, 0, s, c)`` with ``c >= 0`` and ``c <| x`` is
    ``Constraint(0, x, s, -c)`` with ``c >= 0``; diagonals over two real clocks
    take any integer bound.
    """

    lhs: int
    rhs: int
    strict: bool
    bound: int

    def __post_init__(self):
        if self.lhs == self.rhs:
            raise ModelError("constraint must relate two distinct clocks")
        if self.lhs < 0 or self.rhs < 0:
            raise ModelError("clock index must be non-negative")
        check_const(self.bound)
        if self.rhs == 0 and self.bound < 0:
            raise ModelError(f"upper bound constant must be natural, got {self.bound}")
        if self.lhs == 0 and self.bound > 0:
            raise ModelError(f"lower bound constant must be natural, got {-self.bound}")

    @property
    def is_diagonal(self) -> bool:
        return self.lhs != 0 and self.rhs != 0

    @property
    def raw(self) -> int:
        return encode(self.strict, self.bound)

    def holds(self, v: Sequence) -> bool:
        d = v[self.lhs] - v[self.rhs]
        return d < self.bound if self.strict else d <= self.bound

    def negate(self) -> "Constraint":
        return Constraint(self.rhs, self.lhs, not self.strict, -self.bound)

    def clocks(self) -> frozenset[int]:
        return frozenset(i for i in (self.lhs, self.rhs) if i)


def upper(x: int, c: int, strict: bool = False) -> Constraint:
    return Constraint(x, 0, strict, c)


def lower(x: int, c: int, strict: bool = False) -> Constraint:
    return Constraint(0, x, strict, -c)


def diagonal(x: int, y: int, c: int, strict: bool = False) -> Constraint:
    return Constraint(x, y, strict, c)


def satisfies(v: Sequence, phi: Constraint) -> bool:
    return phi.holds(v)


def satisfies_all(v: Sequence, guard: Iterable[Constraint]) -> bool:
    return all(phi.holds(v) for phi in guard)


@dataclass(frozen=True)
class UpdateMap:
    """Simultaneous clock update.

    ``items`` holds sorted triples ``(clock, source, offset)`` meaning
    ``clock := x_source + offset``; source 0 is the constant form
    ``clock := offset``. Clocks not listed keep their value.
    """

    items: tuple[tuple[int, int, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[int, tuple[int, int]] | Iterable[tuple[int, int, int]]) -> "UpdateMap":
        if isinstance(mapping, Mapping):
            triples = [(x, src, off) for x, (src, off) in mapping.items()]
        else:
            triples = list(mapping)
        seen: set[int] = set()
        out = []
        for x, src, off in triples:
            if x <= 0:
                raise ModelError("updates only write real clocks")
            if x in seen:
                raise ModelError(f"clock {x} updated twice")
            seen.add(x)
            check_const(off)
            if src == 0 and off < 0:
                raise ModelError(f"constant update must be natural, got {off}")
            if src == x and off == 0:
                continue
            out.append((x, src, off))
        return cls(tuple(sorted(out)))

    @classmethod
    def reset(cls, clocks: Iterable[int]) -> "UpdateMap":
        return cls.of([(x, 0, 0) for x in clocks])

    def __iter__(self):
        return iter(self.items)

    def __bool__(self):
        return bool(self.items)

    @cached_property
    def _table(self) -> dict[int, tuple[int, int]]:
        return {x: (src, off) for x, src, off in self.items}

    def rhs(self, x: int) -> tuple[int, int]:
        """``(source, offset)`` with ``x := x_source + offset``; zero clock maps to (0, 0)."""
        if x == 0:
            return (0, 0)
        return self._table.get(x, (x, 0))

    @property
    def written(self) -> frozenset[int]:
        return frozenset(x for x, _, _ in self.items)

    @property
    def is_reset_only(self) -> bool:
        return all(src == 0 and off == 0 for _, src, off in self.items)

    @property
    def reset_set(self) -> frozenset[int]:
        return frozenset(x for x, src, off in self.items if src == 0 and off == 0)

    def apply(self, v: Sequence):
        return apply_update(v, self)


def apply_update(v: Sequence, up: UpdateMap):
    """Image of ``v`` under ``up``, or None when some clock would go negative."""
    w = list(v)
    for x, src, off in up.items:
        val = v[src] + off
        if val < 0:
            return None
        w[x] = val
    return tuple(w)


def elapse(v: Sequence, delta) -> tuple:
    if delta < 0:
        raise ValueError("delay must be non-negative")
    return (v[0],) + tuple(c + delta for c in v[1:])


def zero_valuation(nclocks: int) -> tuple:
    return (0,) * (nclocks + 1)


def normalize_guard(guard: Iterable[Constraint]) -> tuple[Constraint, ...]:
    return tuple(sorted(set(guard)))


@dataclass(frozen=True)
class Transition:
    source: int
    target: int
    guard: tuple[Constraint, ...] = ()
    update: UpdateMap = field(default_factory=UpdateMap)
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "guard", normalize_guard(self.guard))

    @property
    def diagonal_guards(self) -> tuple[Constraint, ...]:
        return tuple(c for c in self.guard if c.is_diagonal)


@dataclass(frozen=True)
class Automaton:
    """A single (product) automaton; integer variables are already folded into states."""

    clocks: tuple[str, ...]
    states: tuple[str, ...]
    initial: int
    transitions: tuple[Transition, ...]
    accepting: frozenset[int] = frozenset()
    committed: frozenset[int] = frozenset()

    def __post_init__(self):
        n = len(self.states)
        if not 0 <= self.initial < n:
            raise ModelError("initial state out of range")
        if len(set(self.states)) != n:
            raise ModelError("duplicate state names")
        if len(set(self.clocks)) != len(self.clocks):
            raise ModelError("duplicate clock names")
        k = len(self.clocks)
        for t in self.transitions:
            if not (0 <= t.source < n and 0 <= t.target < n):
                raise ModelError("transition endpoint out of range")
            for c in t.guard:
                if c.lhs > k or c.rhs > k:
                    raise ModelError("guard mentions an unknown clock")
            for x, src, _ in t.update.items:
                if x > k or src > k:
                    raise ModelError("update mentions an unknown clock")
        for q in self.accepting | self.committed:
            if not 0 <= q < n:
                raise ModelError("state flag out of range")

    @property
    def nclocks(self) -> int:
        return len(self.clocks)

    @property
    def dim(self) -> int:
        return len(self.clocks) + 1

    @cached_property
    def outgoing(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.states]
        for idx, t in enumerate(self.transitions):
            out[t.source].append(idx)
        return tuple(tuple(o) for o in out)

    @cached_property
    def diagonals(self) -> tuple[Constraint, ...]:
        return tuple(sorted({c for t in self.transitions for c in t.guard if c.is_diagonal}))

    @property
    def is_diagonal_free(self) -> bool:
        return not self.diagonals

    @property
    def is_reset_only(self) -> bool:
        return all(t.update.is_reset_only for t in self.transitions)

    def state_index(self, name: str) -> int:
        return self.states.index(name)
