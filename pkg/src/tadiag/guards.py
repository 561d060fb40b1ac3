"""Weakest preconditions of guard sets and the per-state guard fixpoint.

``G(q)`` is the least family of constraint sets such that every outgoing
transition ``(q, g, up, q1)`` contributes ``g``, the constraints keeping the
update non-negative, and the weakest precondition of ``G(q1)`` through ``up``.
With general updates the least solution may be infinite; the iteration colours
each stage red or green and gives up once a red stage survives to ``K``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from ._bounds import LU_NEG
from .model import Automaton, Constraint, ModelError, UpdateMap


class NonFiniteGuardsError(ModelError):
    """The guard fixpoint of an automaton has no finite solution."""

    def __init__(self, state: int, constraint: Constraint, stage: int):
        super().__init__(f"guard sets are not finite: state {state} keeps growing "
                         f"(constraint {constraint}, stage {stage})")
        self.state = state
        self.constraint = constraint
        self.stage = stage


def _well_formed(lhs: int, rhs: int, strict: bool, bound: int) -> Constraint | None:
    if lhs == rhs:
        return None
    if rhs == 0 and bound < 0:
        return None
    if lhs == 0 and bound > 0:
        return None
    return Constraint(lhs, rhs, strict, bound)


def wp_reset(phi: Constraint, resets: Iterable[int]) -> frozenset[Constraint]:
    """Weakest precondition of a constraint through a reset set, by case analysis."""
    r = frozenset(resets)
    x, y = phi.lhs, phi.rhs
    if not phi.is_diagonal:
        clock = x or y
        return frozenset() if clock in r else frozenset({phi})
    c = phi.bound
    if x not in r and y not in r:
        return frozenset({phi})
    if y in r and x not in r and c >= 0:
        return frozenset({Constraint(x, 0, phi.strict, c)})
    if x in r and y not in r and -c >= 0:
        return frozenset({Constraint(0, y, phi.strict, c)})
    return frozenset()


def wp_update(phi: Constraint, up: UpdateMap) -> frozenset[Constraint]:
    """Substitute ``up`` into ``phi``; keep the result only if it is a proper constraint.

    ``x_i - x_j <| b`` with ``x_i := x_p + d_i`` and ``x_j := x_q + d_j``
    becomes ``x_p - x_q <| b - d_i + d_j``. When ``p == q`` the difference is
    constant (or both sides are constants) and nothing is needed.
    """
    p, di = up.rhs(phi.lhs)
    q, dj = up.rhs(phi.rhs)
    c = _well_formed(p, q, phi.strict, phi.bound - di + dj)
    return frozenset() if c is None else frozenset({c})


def wp_set(guards: Iterable[Constraint], up: UpdateMap) -> frozenset[Constraint]:
    out: set[Constraint] = set()
    for phi in guards:
        out |= wp_update(phi, up)
    return frozenset(out)


def wp_nonneg(up: UpdateMap) -> frozenset[Constraint]:
    """Constraints on the source valuation under which ``up`` yields no negative clock."""
    return wp_set((Constraint(0, x, False, 0) for x in up.written), up)


def lu_bounds(guards: Iterable[Constraint], nclocks: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-clock maxima of lower (``c <| x``) and upper (``x <| c``) constants.

    Arrays have one slot per DBM index; slot 0 and absent clocks hold ``LU_NEG``.
    """
    lo = np.full(nclocks + 1, LU_NEG, dtype=np.int64)
    hi = np.full(nclocks + 1, LU_NEG, dtype=np.int64)
    for phi in guards:
        if phi.is_diagonal:
            continue
        if phi.rhs == 0:
            hi[phi.lhs] = max(hi[phi.lhs], phi.bound)
        else:
            lo[phi.rhs] = max(lo[phi.rhs], -phi.bound)
    return lo, hi


class GuardSet:
    """Immutable set of constraints with cached diagonal / non-diagonal views."""

    __slots__ = ("constraints", "nclocks", "__dict__")

    def __init__(self, constraints: Iterable[Constraint] = (), nclocks: int = 0):
        self.constraints = frozenset(constraints)
        self.nclocks = nclocks

    def __iter__(self):
        return iter(sorted(self.constraints))

    def __len__(self):
        return len(self.constraints)

    def __contains__(self, phi):
        return phi in self.constraints

    def __eq__(self, other):
        if isinstance(other, GuardSet):
            return self.constraints == other.constraints
        return NotImplemented

    def __hash__(self):
        return hash(self.constraints)

    def __repr__(self):
        return f"GuardSet({sorted(self.constraints)})"

    def __or__(self, other: Iterable[Constraint]) -> "GuardSet":
        extra = other.constraints if isinstance(other, GuardSet) else frozenset(other)
        if extra <= self.constraints:
            return self
        return GuardSet(self.constraints | extra, self.nclocks)

    @cached_property
    def diagonals(self) -> tuple[Constraint, ...]:
        return tuple(sorted(c for c in self.constraints if c.is_diagonal))

    @cached_property
    def nondiagonals(self) -> tuple[Constraint, ...]:
        return tuple(sorted(c for c in self.constraints if not c.is_diagonal))

    @cached_property
    def lu(self) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = lu_bounds(self.nondiagonals, self.nclocks)
        lo.setflags(write=False)
        hi.setflags(write=False)
        return lo, hi

    def without(self, phi: Constraint) -> "GuardSet":
        return GuardSet(self.constraints - {phi}, self.nclocks)

    def diagonal_part(self) -> "GuardSet":
        return GuardSet(self.diagonals, self.nclocks)

    def nondiagonal_part(self) -> "GuardSet":
        return GuardSet(self.nondiagonals, self.nclocks)


@dataclass(frozen=True)
class GuardSetTable:
    """Outcome of the guard fixpoint.

    When ``finite`` is False, ``guards`` holds the last computed stage and
    ``witness`` names a state and a constraint that was still growing at
    stage ``K``.
    """

    guards: tuple[GuardSet, ...]
    finite: bool
    stages: int
    bound_k: int
    witness: tuple[int, Constraint] | None = None

    def __getitem__(self, q: int) -> GuardSet:
        return self.guards[q]

    def __len__(self):
        return len(self.guards)

    def require_finite(self) -> "GuardSetTable":
        if not self.finite:
            q, phi = self.witness
            raise NonFiniteGuardsError(q, phi, self.stages)
        return self


def stage_bound(a: Automaton) -> int:
    n = a.nclocks
    return 1 + len(a.states) * n * (n + 1)


def local_contributions(a: Automaton) -> list[set[Constraint]]:
    """Stage 0: guards of outgoing transitions plus their non-negativity preconditions."""
    g0: list[set[Constraint]] = [set() for _ in a.states]
    for t in a.transitions:
        g0[t.source].update(t.guard)
        g0[t.source] |= wp_nonneg(t.update)
    return g0


def _is_red(added: Iterable[Constraint], before: set[Constraint]) -> Constraint | None:
    """A newly added constraint that makes a stage red, if any."""
    upper: dict[int, int] = {}
    lower: dict[int, int] = {}
    for c in before:
        if c.is_diagonal:
            continue
        if c.rhs == 0:
            upper[c.lhs] = max(upper.get(c.lhs, -1), c.bound)
        else:
            lower[c.rhs] = max(lower.get(c.rhs, -1), -c.bound)
    for c in sorted(added):
        if c.is_diagonal:
            return c
        if c.rhs == 0:
            if c.bound > upper.get(c.lhs, -1):
                return c
        elif -c.bound > lower.get(c.rhs, -1):
            return c
    return None


def apply_stage(a: Automaton, sets: list[set[Constraint]] | tuple) -> list[set[Constraint]]:
    """One synchronous iteration ``G^{i+1}(q) = G^i(q) ∪ wp(G^i(q1), up)``."""
    nxt = [set(s) for s in sets]
    for t in a.transitions:
        nxt[t.source] |= wp_set(sets[t.target], t.update)
    return nxt


def compute_state_guards(a: Automaton, max_stages: int | None = None) -> GuardSetTable:
    """Kleene iteration with the red/green termination test.

    Each stage is computed synchronously from the previous one; only the
    constraints that were new at stage ``i`` are pushed through ``wp`` to form
    stage ``i + 1`` (the other contributions are already present).
    """
    k = stage_bound(a)
    into = [[] for _ in a.states]
    for t in a.transitions:
        into[t.target].append(t)
    cur = local_contributions(a)
    delta = [set(s) for s in cur]
    stage = 0
    all_green_at: int | None = None
    while True:
        new = [set() for _ in a.states]
        for q1, d in enumerate(delta):
            if not d:
                continue
            for t in into[q1]:
                for c in wp_set(d, t.update):
                    if c not in cur[t.source]:
                        new[t.source].add(c)
        stage += 1
        if not any(new):
            break
        red = None
        for q, added in enumerate(new):
            phi = _is_red(added, cur[q])
            if phi is not None:
                red = (q, phi)
                break
        if red is None:
            if all_green_at is None:
                all_green_at = stage
        elif all_green_at is not None:
            raise AssertionError(f"stage {stage} is red after an all-green stage {all_green_at}")
        if red is not None and stage >= k:
            return GuardSetTable(tuple(GuardSet(s, a.nclocks) for s in cur), False, stage, k, red)
        for q, added in enumerate(new):
            cur[q] |= added
        delta = new
        if max_stages is not None and stage >= max_stages:
            raise RuntimeError("guard fixpoint did not settle within the stage limit")
    return GuardSetTable(tuple(GuardSet(s, a.nclocks) for s in cur), True, stage, k)


def is_fixpoint(a: Automaton, table: GuardSetTable) -> bool:
    """Applying the defining equations once more leaves every set unchanged."""
    g0 = local_contributions(a)
    sets = [set(gs.constraints) for gs in table.guards]
    nxt = apply_stage(a, sets)
    return all(nxt[q] | g0[q] == sets[q] for q in range(len(sets)))


def compute_state_lu(a: Automaton) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-state LU bounds by worklist propagation of maximal constants.

    For non-diagonal guards only the per-(clock, side) maximum matters, so the
    classical LU propagation applies: bounds flow backwards along transitions,
    dropping reset clocks and shifting through copies and offsets. Diagonal
    guards must have been removed first.
    """
    n = a.nclocks
    lo = [np.full(n + 1, LU_NEG, dtype=np.int64) for _ in a.states]
    hi = [np.full(n + 1, LU_NEG, dtype=np.int64) for _ in a.states]
    seed = local_contributions(a)
    for q, cs in enumerate(seed):
        if any(c.is_diagonal for c in cs):
            raise ModelError("LU propagation needs a diagonal-free automaton")
        l, u = lu_bounds(cs, n)
        lo[q] = np.maximum(lo[q], l)
        hi[q] = np.maximum(hi[q], u)
    into = [[] for _ in a.states]
    for t in a.transitions:
        into[t.target].append(t)
    work = deque(range(len(a.states)))
    queued = set(work)
    limit = stage_bound(a) * max(1, len(a.transitions))
    rounds = 0
    while work:
        q1 = work.popleft()
        queued.discard(q1)
        rounds += 1
        if rounds > limit * (n + 1) * 4 + 1000:
            raise NonFiniteGuardsError(q1, Constraint(1, 0, False, int(hi[q1].max(initial=0))), rounds)
        for t in into[q1]:
            q = t.source
            changed = False
            for x in range(1, n + 1):
                src, off = t.update.rhs(x)
                if src == 0:
                    continue
                if hi[q1][x] >= 0 and hi[q1][x] - off >= 0 and hi[q1][x] - off > hi[q][src]:
                    hi[q][src] = hi[q1][x] - off
                    changed = True
                if lo[q1][x] >= 0 and lo[q1][x] - off >= 0 and lo[q1][x] - off > lo[q][src]:
                    lo[q][src] = lo[q1][x] - off
                    changed = True
            if changed and q not in queued:
                work.append(q)
                queued.add(q)
    return list(zip(lo, hi))


def format_table(a: Automaton, table: GuardSetTable, names: list[str] | None = None) -> str:
    """Deterministic text report of per-state guard sets and LU bounds."""
    from .parser import format_constraint

    clocks = list(names or a.clocks)
    lines = []
    for q, gs in enumerate(table.guards):
        lines.append(f"state {a.states[q]}:")
        cons = sorted(gs.constraints)
        if cons:
            lines.extend(f"  {format_constraint(c, clocks)}" for c in cons)
        else:
            lines.append("  (none)")
        lo, hi = gs.lu
        fmt = lambda v: "-inf" if v < 0 else str(int(v))  # noqa: E731
        lines.append("  L: " + ", ".join(f"{clocks[x - 1]}={fmt(lo[x])}" for x in range(1, a.nclocks + 1)))
        lines.append("  U: " + ", ".join(f"{clocks[x - 1]}={fmt(hi[x])}" for x in range(1, a.nclocks + 1)))
    if table.finite:
        lines.append(f"verdict: Finite (stages={table.stages}, K={table.bound_k})")
    else:
        q, phi = table.witness
        lines.append(f"verdict: NonFinite at stage {table.stages} (K={table.bound_k}): "
                     f"state {a.states[q]} adds {format_constraint(phi, clocks)}")
    return "\n".join(lines) + "\n"
