"""Zone-graph reachability with simulation-based pruning.

``reach_static`` covers a new node when some stored node of the same state
simulates it under the precomputed guard set ``G(q)``. ``reach_dynamic`` starts
every node with the non-diagonal part of ``G(q)`` only and learns diagonal
guards on the fly, propagating them backwards along tree and cover edges and
re-opening covered nodes whose cover no longer holds.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable

from .dbm import Dbm, apply_update_zone, elapse, includes, intersect_all, point_zone
from .guards import GuardSet, GuardSetTable, compute_state_guards, wp_set
from .model import Automaton, ModelError, Transition, apply_update, satisfies_all, zero_valuation
from .points import RationalSystem, solve
from .simulation import SimStats, zone_sim_lug


class Verdict(str, Enum):
    REACHABLE = "Reachable"
    UNREACHABLE = "Unreachable"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class SearchStats:
    nodes_created: int = 0
    nodes_visited: int = 0
    nodes_covered: int = 0
    sim_calls: int = 0
    max_waiting: int = 0
    elapsed_ms: float = 0.0
    propagations: int = 0
    reactivations: int = 0
    nodes_stored: int = 0  # nodes kept uncovered at the end

    def as_dict(self) -> dict:
        return {
            "nodes_created": self.nodes_created,
            "nodes_visited": self.nodes_visited,
            "nodes_covered": self.nodes_covered,
            "sim_calls": self.sim_calls,
            "max_waiting": self.max_waiting,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


@dataclass
class ReachResult:
    verdict: Verdict
    stats: SearchStats
    witness: tuple[int, ...] | None = None  # transition indices from the initial state
    reason: str | None = None
    graph: "SearchGraph | None" = None

    @property
    def reachable(self) -> bool:
        return self.verdict is Verdict.REACHABLE


@dataclass
class Limits:
    max_nodes: int | None = None
    timeout_s: float | None = None


class _Budget:
    def __init__(self, limits: Limits | None):
        self.limits = limits or Limits()
        self.deadline = (time.perf_counter() + self.limits.timeout_s
                         if self.limits.timeout_s is not None else None)

    def exceeded(self, nodes: int) -> str | None:
        if self.limits.max_nodes is not None and nodes > self.limits.max_nodes:
            return f"node limit {self.limits.max_nodes} reached"
        if self.deadline is not None and time.perf_counter() > self.deadline:
            return f"time limit {self.limits.timeout_s}s reached"
        return None


def start_zone(a: Automaton) -> Dbm:
    z = point_zone(zero_valuation(a.nclocks))
    return z if a.initial in a.committed else elapse(z)


def successor(a: Automaton, z: Dbm | None, t: Transition) -> Dbm | None:
    """Guard, update, then let time pass unless the target is committed."""
    z1 = apply_update_zone(intersect_all(z, t.guard), t.update)
    if z1 is None or t.target in a.committed:
        return z1
    return elapse(z1)


# -- search structure ---------------------------------------------------------

@dataclass
class SearchGraph:
    """Nodes of a finished search with their edges; used for audits and witnesses."""

    states: list[int] = field(default_factory=list)
    zones: list[Dbm] = field(default_factory=list)
    guards: list[GuardSet] = field(default_factory=list)
    status: list[str] = field(default_factory=list)  # waiting / passed / covered
    parent: list[tuple[int, int] | None] = field(default_factory=list)  # (node, transition)
    children: list[list[tuple[int, int]]] = field(default_factory=list)  # (transition, node)
    cover: list[int | None] = field(default_factory=list)
    covered_by_me: list[set[int]] = field(default_factory=list)

    def add(self, q: int, z: Dbm, g: GuardSet, parent: tuple[int, int] | None) -> int:
        i = len(self.states)
        self.states.append(q)
        self.zones.append(z)
        self.guards.append(g)
        self.status.append("waiting")
        self.parent.append(parent)
        self.children.append([])
        self.cover.append(None)
        self.covered_by_me.append(set())
        if parent is not None:
            self.children[parent[0]].append((parent[1], i))
        return i

    def path(self, i: int) -> tuple[int, ...]:
        out = []
        while self.parent[i] is not None:
            p, t = self.parent[i]
            out.append(t)
            i = p
        return tuple(reversed(out))


def _generic_search(a: Automaton, covers: Callable[[int, Dbm, Dbm, SimStats], bool],
                    order: str, limits: Limits | None, keep_graph: bool) -> ReachResult:
    t0 = time.perf_counter()
    stats = SearchStats()
    sim = SimStats()
    budget = _Budget(limits)
    graph = SearchGraph()
    z0 = start_zone(a)
    root = graph.add(a.initial, z0, GuardSet(), None)
    stats.nodes_created = 1

    def finish(verdict, witness=None, reason=None):
        stats.sim_calls = sim.queries
        stats.nodes_stored = stats.nodes_created
        stats.elapsed_ms = (time.perf_counter() - t0) * 1000
        return ReachResult(verdict, stats, witness, reason, graph if keep_graph else None)

    if a.initial in a.accepting:
        return finish(Verdict.REACHABLE, ())
    waiting: deque[int] = deque([root])
    stored: list[list[int]] = [[] for _ in a.states]
    stored[a.initial].append(root)
    stats.max_waiting = 1
    while waiting:
        reason = budget.exceeded(stats.nodes_created)
        if reason:
            return finish(Verdict.INCONCLUSIVE, reason=reason)
        n = waiting.popleft() if order == "bfs" else waiting.pop()
        stats.nodes_visited += 1
        z = graph.zones[n]
        for ti in a.outgoing[graph.states[n]]:
            t = a.transitions[ti]
            z1 = successor(a, z, t)
            if z1 is None:
                continue
            q1 = t.target
            if q1 in a.accepting:
                m = graph.add(q1, z1, GuardSet(), (n, ti))
                stats.nodes_created += 1
                return finish(Verdict.REACHABLE, graph.path(m))
            if any(covers(q1, z1, graph.zones[o], sim) for o in stored[q1]):
                stats.nodes_covered += 1
                continue
            m = graph.add(q1, z1, GuardSet(), (n, ti))
            stats.nodes_created += 1
            stored[q1].append(m)
            waiting.append(m)
            stats.max_waiting = max(stats.max_waiting, len(waiting))
        graph.status[n] = "passed"
    return finish(Verdict.UNREACHABLE)


def reach_static(a: Automaton, table: GuardSetTable | None = None, *, order: str = "bfs",
                 limits: Limits | None = None, keep_graph: bool = False) -> ReachResult:
    """Passed/Waiting search; a successor is dropped when a stored node of the same state covers it."""
    if table is None:
        table = compute_state_guards(a)
    table.require_finite()

    def covers(q1, z1, other, sim):
        if includes(other, z1):
            sim.queries += 1
            return True
        return zone_sim_lug(z1, other, table[q1], sim)

    return _generic_search(a, covers, order, limits, keep_graph)


# -- dynamic detection of relevant diagonals --------------------------------

def _transport(g1: GuardSet, t: Transition) -> GuardSet:
    return GuardSet(wp_set(g1.constraints, t.update), g1.nclocks)


def required_diagonals(z: Dbm, t: Transition, g1: GuardSet, sim: SimStats | None = None) -> frozenset:
    """Diagonals a node with zone ``z`` must track for its edge ``t`` to a node guarded by ``g1``."""
    moved = _transport(g1, t)
    need = set(moved.diagonals)
    diag_guard = [c for c in t.guard if c.is_diagonal]
    if diag_guard and not zone_sim_lug(z, intersect_all(z, t.guard), moved, sim):
        need.update(diag_guard)
    return frozenset(need)


class _Dynamic:
    def __init__(self, a: Automaton, table: GuardSetTable, order: str, limits: Limits | None):
        self.a = a
        self.order = order
        self.base = [gs.nondiagonal_part() for gs in table.guards]
        self.graph = SearchGraph()
        self.stats = SearchStats()
        self.sim = SimStats()
        self.budget = _Budget(limits)
        self.waiting: deque[int] = deque()
        self.stored: list[list[int]] = [[] for _ in a.states]

    # Guard growth at node ``n``; recurse over incoming tree and cover edges.
    def _grow(self, n: int, extra: frozenset) -> None:
        g = self.graph
        work = [(n, extra)]
        while work:
            m, add = work.pop()
            new = g.guards[m] | add
            if new is g.guards[m]:
                continue
            g.guards[m] = new
            self.stats.propagations += 1
            if g.parent[m] is not None:
                p, ti = g.parent[m]
                work.append((p, required_diagonals(g.zones[p], self.a.transitions[ti], new, self.sim)))
            for c in g.covered_by_me[m]:
                work.append((c, frozenset(new.diagonals)))

    def _cover_holds(self, n: int, by: int) -> bool:
        g = self.graph
        if includes(g.zones[by], g.zones[n]):
            self.sim.queries += 1
            return True
        return zone_sim_lug(g.zones[n], g.zones[by], g.guards[by], self.sim)

    def _set_cover(self, n: int, by: int) -> None:
        g = self.graph
        g.status[n] = "covered"
        g.cover[n] = by
        g.covered_by_me[by].add(n)
        self._grow(n, frozenset(g.guards[by].diagonals))

    def _push(self, n: int) -> None:
        self.graph.status[n] = "waiting"
        self.stored[self.graph.states[n]].append(n)
        self.waiting.append(n)
        self.stats.max_waiting = max(self.stats.max_waiting, len(self.waiting))

    def _recheck_covered(self) -> None:
        g = self.graph
        for n in range(len(g.states)):
            if g.status[n] != "covered":
                continue
            by = g.cover[n]
            if not self._cover_holds(n, by):
                g.covered_by_me[by].discard(n)
                g.cover[n] = None
                self.stats.reactivations += 1
                self.stats.nodes_covered -= 1
                self._push(n)

    def run(self) -> ReachResult:
        a, g, stats = self.a, self.graph, self.stats
        t0 = time.perf_counter()

        def finish(verdict, witness=None, reason=None):
            stats.sim_calls = self.sim.queries
            stats.nodes_stored = stats.nodes_created - stats.nodes_covered
            stats.elapsed_ms = (time.perf_counter() - t0) * 1000
            return ReachResult(verdict, stats, witness, reason, g)

        root = g.add(a.initial, start_zone(a), self.base[a.initial], None)
        stats.nodes_created = 1
        if a.initial in a.accepting:
            return finish(Verdict.REACHABLE, ())
        self._push(root)
        while True:
            if not self.waiting:
                self._recheck_covered()
                if not self.waiting:
                    return finish(Verdict.UNREACHABLE)
            reason = self.budget.exceeded(stats.nodes_created)
            if reason:
                return finish(Verdict.INCONCLUSIVE, reason=reason)
            n = self.waiting.popleft() if self.order == "bfs" else self.waiting.pop()
            stats.nodes_visited += 1
            z = g.zones[n]
            for ti in a.outgoing[g.states[n]]:
                t = a.transitions[ti]
                z1 = successor(a, z, t)
                if z1 is None:
                    # disabled edge: the guard set at n must explain why
                    need = required_diagonals(z, t, GuardSet((), a.nclocks), self.sim)
                    self._grow(n, need)
                    continue
                q1 = t.target
                m = g.add(q1, z1, self.base[q1], (n, ti))
                stats.nodes_created += 1
                if q1 in a.accepting:
                    return finish(Verdict.REACHABLE, g.path(m))
                self._grow(n, required_diagonals(z, t, g.guards[m], self.sim))
                by = next((o for o in self.stored[q1] if self._cover_holds(m, o)), None)
                if by is not None:
                    stats.nodes_covered += 1
                    self._set_cover(m, by)
                else:
                    self._push(m)
            g.status[n] = "passed"


def reach_dynamic(a: Automaton, table: GuardSetTable | None = None, *, order: str = "bfs",
                  limits: Limits | None = None) -> ReachResult:
    """Search that discovers relevant diagonal guards per node.

    Nodes start with the non-diagonal part of the static guard sets; the
    static table must be finite. The returned result always carries the
    final search graph so that it can be audited.
    """
    if table is None:
        table = compute_state_guards(a)
    table.require_finite()
    return _Dynamic(a, table, order, limits).run()


def audit_dynamic(a: Automaton, graph: SearchGraph) -> list[str]:
    """Check the closure properties of a finished (unreachable) dynamic search.

    Every non-covered node has all its non-empty successors as children,
    every covered node is simulated by its coverer under the coverer's final
    guards, and every tree or cover edge satisfies the propagation invariant.
    Returns a list of violations (empty when the structure is sound).
    """
    problems = []
    for n, q in enumerate(graph.states):
        z = graph.zones[n]
        if graph.status[n] != "covered":
            have = {ti for ti, _ in graph.children[n]}
            for ti in a.outgoing[q]:
                if ti not in have and successor(a, z, a.transitions[ti]) is not None:
                    problems.append(f"node {n}: successor by transition {ti} missing")
        else:
            by = graph.cover[n]
            if not zone_sim_lug(z, graph.zones[by], graph.guards[by]):
                problems.append(f"node {n}: not simulated by its coverer {by}")
            if not set(graph.guards[by].diagonals) <= graph.guards[n].constraints:
                problems.append(f"node {n}: misses diagonals of its coverer {by}")
        for ti, m in graph.children[n]:
            need = required_diagonals(z, a.transitions[ti], graph.guards[m])
            if not need <= graph.guards[n].constraints:
                problems.append(f"edge {n}->{m}: guard set lacks {sorted(need - graph.guards[n].constraints)}")
        for ti in a.outgoing[q]:
            t = a.transitions[ti]
            if graph.status[n] != "covered" and successor(a, z, t) is None:
                need = required_diagonals(z, t, GuardSet((), a.nclocks))
                if not need <= graph.guards[n].constraints:
                    problems.append(f"node {n}: disabled transition {ti} not explained")
    return problems


# -- witnesses ----------------------------------------------------------------

class WitnessError(AssertionError):
    """A reported path has no concrete run."""


@dataclass(frozen=True)
class ConcreteRun:
    delays: tuple[Fraction, ...]  # delay spent before each transition
    transitions: tuple[int, ...]
    valuations: tuple[tuple[Fraction, ...], ...]  # after each transition, before the next delay


def concretize(a: Automaton, path: tuple[int, ...]) -> ConcreteRun:
    """Find exact rational delays realising ``path`` and replay them.

    Time point ``T_i`` is the date of the ``i``-th transition (``T_0 = 0`` is
    the start). Each clock is tracked as ``T - T_anchor + offset`` so every
    guard and every non-negativity requirement is a difference constraint
    between two time points.
    """
    k = len(path)
    n = a.nclocks
    sys_ = RationalSystem.unconstrained(k + 1)
    m = sys_.m

    def bound(i, j, strict, c):
        e = (Fraction(c), strict)
        cur = m[i][j]
        if cur is None or e[0] < cur[0] or (e[0] == cur[0] and e[1] and not cur[1]):
            m[i][j] = e

    anchor = [0] * (n + 1)
    offset = [0] * (n + 1)
    state = a.initial
    for step, ti in enumerate(path, start=1):
        t = a.transitions[ti]
        if t.source != state:
            raise WitnessError(f"transition {ti} does not leave state {state}")
        bound(step - 1, step, False, 0)  # T_{step-1} <= T_step
        if state in a.committed:
            bound(step, step - 1, False, 0)
        for c in t.guard:
            # x_l - x_r = (T - T_al + o_l) - (T - T_ar + o_r); the zero clock cancels T itself
            if c.lhs and c.rhs:
                bound(anchor[c.rhs], anchor[c.lhs], c.strict, c.bound - offset[c.lhs] + offset[c.rhs])
            elif c.lhs:
                bound(step, anchor[c.lhs], c.strict, c.bound - offset[c.lhs])
            else:
                bound(anchor[c.rhs], step, c.strict, c.bound + offset[c.rhs])
        new_anchor, new_offset = list(anchor), list(offset)
        for x, src, off in t.update.items:
            if src == 0:
                new_anchor[x], new_offset[x] = step, off
            else:
                new_anchor[x], new_offset[x] = anchor[src], offset[src] + off
                # value T_step - T_a + o >= 0
                bound(anchor[src], step, False, offset[src] + off)
        anchor, offset = new_anchor, new_offset
        state = t.target
    times = solve(sys_)
    if times is None:
        raise WitnessError("no timing satisfies the path constraints")
    return replay(a, path, [times[i] - times[i - 1] for i in range(1, k + 1)])


def replay(a: Automaton, path, delays) -> ConcreteRun:
    v = zero_valuation(a.nclocks)
    v = tuple(Fraction(x) for x in v)
    state = a.initial
    vals = []
    for d, ti in zip(delays, path):
        t = a.transitions[ti]
        if d < 0 or (d > 0 and state in a.committed) or t.source != state:
            raise WitnessError(f"illegal delay {d} or transition {ti} at state {state}")
        v = (v[0],) + tuple(x + d for x in v[1:])
        if not satisfies_all(v, t.guard):
            raise WitnessError(f"guard of transition {ti} fails at {v}")
        w = apply_update(v, t.update)
        if w is None:
            raise WitnessError(f"update of transition {ti} makes a clock negative at {v}")
        v = w
        vals.append(v)
        state = t.target
    if state not in a.accepting:
        raise WitnessError("path does not end in an accepting state")
    return ConcreteRun(tuple(delays), tuple(path), tuple(vals))


def check_witness(a: Automaton, result: ReachResult) -> ConcreteRun | None:
    if not result.reachable:
        return None
    if result.witness is None:
        raise ModelError("reachable verdict without a witness path")
    return concretize(a, result.witness)
