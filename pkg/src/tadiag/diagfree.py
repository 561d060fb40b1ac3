"""Removing diagonal guards by tracking their truth value in the state.

A diagonal ``x - y <| c`` never changes under time elapse, only when ``x`` or
``y`` is reset, so one bit per diagonal records whether it currently holds.
Each product state ``(q, b)`` is named ``q#b``; eliminating ``d`` diagonals
from ``n`` states yields ``2^d * n`` states unless unreachable bit
combinations are pruned.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

from .dbm import includes
from .guards import compute_state_lu
from .model import Automaton, Constraint, ModelError, Transition
from .reach import Limits, ReachResult, SimStats, _generic_search
from .simulation import zone_sim_lu

_TRUE = "true"
_FALSE = "false"


def _fold(lhs: int, rhs: int, strict: bool, bound: int):
    """Constant-fold a non-diagonal whose bound may fall outside the natural range."""
    if rhs == 0:
        if bound < 0 or (bound == 0 and strict):
            return _FALSE
        return Constraint(lhs, 0, strict, bound)
    if bound > 0 or (bound == 0 and not strict):
        return _TRUE
    return Constraint(0, rhs, strict, bound)


def bit_after(phi: Constraint, t: Transition) -> list[tuple[int | None, Constraint | None]]:
    """Possible new bit values for ``phi`` after ``t`` with the guard that selects each.

    Returns ``(bit, extra)`` pairs; ``bit`` None means the bit is unchanged.
    """
    r = t.update.reset_set
    x, y = phi.lhs, phi.rhs
    if x not in r and y not in r:
        return [(None, None)]
    if x in r and y in r:
        return [(int(0 < phi.bound or (phi.bound == 0 and not phi.strict)), None)]
    if x in r:
        # afterwards x - y = -y, evaluated now since y is untouched
        holds = _fold(0, y, phi.strict, phi.bound)
        fails = _fold(y, 0, not phi.strict, -phi.bound)
    else:
        holds = _fold(x, 0, phi.strict, phi.bound)
        fails = _fold(0, x, not phi.strict, -phi.bound)
    out = []
    for bit, g in ((1, holds), (0, fails)):
        if g is _FALSE:
            continue
        out.append((bit, None if g is _TRUE else g))
    return out


def initial_bit(phi: Constraint) -> int:
    return int(0 < phi.bound or (0 == phi.bound and not phi.strict))


def _require_resets(a: Automaton) -> None:
    if not a.is_reset_only:
        raise ModelError("diagonal elimination needs an automaton whose updates are resets")


@dataclass(frozen=True)
class DiagFree:
    """Result of elimination with provenance back to the input automaton."""

    automaton: Automaton
    base: tuple[int, ...]  # original state per new state
    bits: tuple[tuple[int, ...], ...]  # bit vector per new state, sorted-diagonal order
    origin: tuple[int, ...]  # original transition per new transition
    diagonals: tuple[Constraint, ...]


def _reachable_states(nstates: int, initial: int, transitions) -> list[bool]:
    seen = [False] * nstates
    seen[initial] = True
    succ = [[] for _ in range(nstates)]
    for t in transitions:
        succ[t.source].append(t.target)
    work = [initial]
    while work:
        q = work.pop()
        for q1 in succ[q]:
            if not seen[q1]:
                seen[q1] = True
                work.append(q1)
    return seen


def _restrict(df: DiagFree, keep: list[bool]) -> DiagFree:
    a = df.automaton
    index = {}
    for q, k in enumerate(keep):
        if k:
            index[q] = len(index)
    trans, origin = [], []
    for t, o in zip(a.transitions, df.origin):
        if keep[t.source] and keep[t.target]:
            trans.append(Transition(index[t.source], index[t.target], t.guard, t.update, t.label))
            origin.append(o)
    states = tuple(a.states[q] for q in index)
    b = Automaton(a.clocks, states, index[a.initial], tuple(trans),
                  frozenset(index[q] for q in a.accepting if keep[q]),
                  frozenset(index[q] for q in a.committed if keep[q]))
    return DiagFree(b, tuple(df.base[q] for q in index), tuple(df.bits[q] for q in index),
                    tuple(origin), df.diagonals)


def _eliminate_one(df: DiagFree, phi: Constraint, prune: bool) -> DiagFree:
    a = df.automaton
    n = len(a.states)
    new_id = lambda q, b: 2 * q + b  # noqa: E731
    states = tuple(f"{a.states[q]}#{b}" for q in range(n) for b in (0, 1))
    trans, origin = [], []
    for t, o in zip(a.transitions, df.origin):
        sources = (1,) if phi in t.guard else (0, 1)
        guard = tuple(c for c in t.guard if c != phi)
        for b in sources:
            for nb, extra in bit_after(phi, t):
                g = guard if extra is None else guard + (extra,)
                trans.append(Transition(new_id(t.source, b), new_id(t.target, b if nb is None else nb),
                                        g, t.update, t.label))
                origin.append(o)
    b = Automaton(a.clocks, states, new_id(a.initial, initial_bit(phi)), tuple(trans),
                  frozenset(new_id(q, b) for q in a.accepting for b in (0, 1)),
                  frozenset(new_id(q, b) for q in a.committed for b in (0, 1)))
    out = DiagFree(b, tuple(df.base[q] for q in range(n) for _ in (0, 1)),
                   tuple(df.bits[q] + (bb,) for q in range(n) for bb in (0, 1)),
                   tuple(origin), df.diagonals + (phi,))
    if prune:
        out = _restrict(out, _reachable_states(len(states), b.initial, b.transitions))
    return out


def eliminate_traced(a: Automaton, prune: bool = False) -> DiagFree:
    """Eliminate every diagonal of ``a`` in sorted order, keeping provenance."""
    _require_resets(a)
    df = DiagFree(a, tuple(range(len(a.states))), tuple(() for _ in a.states),
                  tuple(range(len(a.transitions))), ())
    for phi in a.diagonals:
        df = _eliminate_one(df, phi, prune)
    if prune and not a.diagonals:
        b = df.automaton
        df = _restrict(df, _reachable_states(len(b.states), b.initial, b.transitions))
    return df


def eliminate_diagonal(a: Automaton, phi: Constraint, prune: bool = False) -> Automaton:
    _require_resets(a)
    if phi not in a.diagonals:
        raise ModelError(f"{phi} does not occur in the automaton")
    df = DiagFree(a, tuple(range(len(a.states))), tuple(() for _ in a.states),
                  tuple(range(len(a.transitions))), ())
    return _eliminate_one(df, phi, prune).automaton


def eliminate_all(a: Automaton, prune: bool = False) -> Automaton:
    return eliminate_traced(a, prune).automaton


def eliminate_reachable(a: Automaton) -> DiagFree:
    """Single forward pass producing only bit vectors reachable in the state graph.

    Equivalent to ``eliminate_traced(a, prune=True)`` up to the order of
    states and transitions, but never builds the full product.
    """
    _require_resets(a)
    diags = a.diagonals
    start = (a.initial, tuple(initial_bit(phi) for phi in diags))
    index = {start: 0}
    order = [start]
    trans, origin = [], []
    work = deque([start])
    while work:
        q, bits = work.popleft()
        src = index[(q, bits)]
        for ti in a.outgoing[q]:
            t = a.transitions[ti]
            if any(phi in t.guard and not bits[k] for k, phi in enumerate(diags)):
                continue
            guard = tuple(c for c in t.guard if not c.is_diagonal)
            options = [((), guard)]
            for k, phi in enumerate(diags):
                nxt = []
                for chosen, g in options:
                    for nb, extra in bit_after(phi, t):
                        nxt.append((chosen + (bits[k] if nb is None else nb,),
                                    g if extra is None else g + (extra,)))
                options = nxt
            for nbits, g in options:
                key = (t.target, nbits)
                if key not in index:
                    index[key] = len(order)
                    order.append(key)
                    work.append(key)
                trans.append(Transition(src, index[key], g, t.update, t.label))
                origin.append(ti)
    names = tuple(a.states[q] + "".join(f"#{b}" for b in bits) for q, bits in order)
    b = Automaton(a.clocks, names, 0, tuple(trans),
                  frozenset(i for i, (q, _) in enumerate(order) if q in a.accepting),
                  frozenset(i for i, (q, _) in enumerate(order) if q in a.committed))
    return DiagFree(b, tuple(q for q, _ in order), tuple(bits for _, bits in order),
                    tuple(origin), diags)


def reach_diagfree(a: Automaton, *, order: str = "bfs", limits: Limits | None = None,
                   keep_graph: bool = False) -> ReachResult:
    """Passed/Waiting search on a diagonal-free automaton covered by per-state LU bounds."""
    if not a.is_diagonal_free:
        raise ModelError("automaton has diagonal guards; eliminate them first")
    lu = compute_state_lu(a)

    def covers(q1, z1, other, sim: SimStats):
        sim.queries += 1
        if includes(other, z1):
            return True
        lo, hi = lu[q1]
        return zone_sim_lu(z1, other, lo, hi, sim)

    return _generic_search(a, covers, order, limits, keep_graph)


def check_via_diagfree(a: Automaton, *, order: str = "bfs", limits: Limits | None = None) -> ReachResult:
    """Eliminate diagonals (reachable bit vectors only), search, and map the witness back."""
    t0 = time.perf_counter()
    budget = limits
    df = eliminate_reachable(a) if not a.is_diagonal_free else None
    target = df.automaton if df is not None else a
    if budget is not None and budget.timeout_s is not None:
        left = budget.timeout_s - (time.perf_counter() - t0)
        budget = Limits(budget.max_nodes, max(left, 0.0))
    res = reach_diagfree(target, order=order, limits=budget)
    res.stats.elapsed_ms = (time.perf_counter() - t0) * 1000
    if res.witness is not None and df is not None:
        res.witness = tuple(df.origin[ti] for ti in res.witness)
    return res
