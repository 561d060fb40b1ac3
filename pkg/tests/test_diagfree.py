import random
from fractions import Fraction

import pytest

from tadiag.diagfree import (bit_after, check_via_diagfree, eliminate_all, eliminate_diagonal, eliminate_reachable,
                             eliminate_traced, initial_bit, reach_diagfree)
from tadiag.model import (Automaton, ModelError, Transition, UpdateMap, apply_update, diagonal, lower, satisfies_all,
                          upper)
from tadiag.reach import Verdict

from helpers import random_automaton, random_run

X, Y, Z = 1, 2, 3


def _t(guard=(), resets=()):
    return Transition(0, 0, tuple(guard), UpdateMap.reset(resets))


def test_initial_bit():
    assert initial_bit(diagonal(X, Y, 0)) == 1
    assert initial_bit(diagonal(X, Y, 0, strict=True)) == 0
    assert initial_bit(diagonal(X, Y, 2)) == 1
    assert initial_bit(diagonal(X, Y, -1)) == 0


def test_bit_after_cases():
    phi = diagonal(X, Y, 2)
    assert bit_after(phi, _t(resets=[Z])) == [(None, None)]
    assert bit_after(phi, _t(resets=[X, Y])) == [(1, None)]
    assert bit_after(diagonal(X, Y, -1), _t(resets=[X, Y])) == [(0, None)]
    # y reset: x - y <= 2 afterwards iff x <= 2 now
    assert bit_after(phi, _t(resets=[Y])) == [(1, upper(X, 2)), (0, lower(X, 2, strict=True))]
    # x reset: -y <= 2 always holds
    assert bit_after(phi, _t(resets=[X])) == [(1, None)]
    # x reset: -y <= -3 iff y >= 3
    assert bit_after(diagonal(X, Y, -3), _t(resets=[X])) == [(1, lower(Y, 3)), (0, upper(Y, 3, strict=True))]
    # y reset, x - y < 0 can never hold afterwards
    assert bit_after(diagonal(X, Y, 0, strict=True), _t(resets=[Y])) == [(0, None)]


def test_single_elimination_example():
    a = Automaton(("x", "y"), ("p", "q"), 0, (
        Transition(0, 0, (lower(X, 1),), UpdateMap.reset([Y])),
        Transition(0, 1, (diagonal(X, Y, 0),)),
    ), frozenset({1}), frozenset())
    b = eliminate_diagonal(a, diagonal(X, Y, 0))
    assert b.states == ("p#0", "p#1", "q#0", "q#1")
    assert b.initial == 1 and b.is_diagonal_free
    assert b.accepting == {2, 3}
    guarded = [t for t in b.transitions if t.target in (2, 3)]
    assert [(t.source, t.target) for t in guarded] == [(1, 3)]
    with pytest.raises(ModelError):
        eliminate_diagonal(a, diagonal(Y, X, 4))


def test_update_automata_are_rejected():
    a = Automaton(("x", "y"), ("p", "q"), 0, (Transition(0, 1, (diagonal(X, Y, 1),), UpdateMap.of({X: (Y, 0)})),),
                  frozenset({1}), frozenset())
    with pytest.raises(ModelError):
        eliminate_all(a)
    with pytest.raises(ModelError):
        reach_diagfree(a)


def test_state_count_is_exponential_in_diagonals():
    rng = random.Random(41)
    for _ in range(100):
        a = random_automaton(rng)
        b = eliminate_all(a)
        assert len(b.states) == 2 ** len(a.diagonals) * len(a.states)
        assert b.is_diagonal_free


def _key_set(df):
    a = df.automaton
    states = {(df.base[q], df.bits[q]) for q in range(len(a.states))}
    key = lambda q: (df.base[q], df.bits[q])  # noqa: E731
    trans = {(key(t.source), key(t.target), t.guard, t.update, o) for t, o in zip(a.transitions, df.origin)}
    return states, trans, key(a.initial), {key(q) for q in a.accepting}


def test_pruned_matches_forward_elimination():
    rng = random.Random(42)
    for _ in range(100):
        a = random_automaton(rng, committed=True)
        assert _key_set(eliminate_traced(a, prune=True)) == _key_set(eliminate_reachable(a))


def lift_and_project(a: Automaton, rng: random.Random) -> None:
    """Lift a random run of ``a`` to the diagonal-free automaton and back; raise on mismatch."""
    df = eliminate_traced(a)
    b = df.automaton
    by_origin = {}
    for i, o in enumerate(df.origin):
        by_origin.setdefault(o, []).append(i)
    state = b.initial
    v = tuple(Fraction(0) for _ in range(a.nclocks + 1))
    bits = lambda w: tuple(int(phi.holds(w)) for phi in df.diagonals)  # noqa: E731
    assert df.bits[state] == bits(v)
    for d, ti, after in random_run(a, rng):
        w = (v[0],) + tuple(c + d for c in v[1:])
        enabled = [i for i in by_origin.get(ti, ()) if b.transitions[i].source == state
                   and satisfies_all(w, b.transitions[i].guard)]
        assert len(enabled) == 1, (ti, state, w)
        t = b.transitions[enabled[0]]
        v = apply_update(w, t.update)
        assert v == after
        state = t.target
        assert df.base[state] == a.transitions[ti].target
        assert df.bits[state] == bits(v)
    # projection: a random run of the product maps to a run of the original
    state_a = a.initial
    v = tuple(Fraction(0) for _ in range(a.nclocks + 1))
    for d, ti, after in random_run(b, rng):
        t = a.transitions[df.origin[ti]]
        w = (v[0],) + tuple(c + d for c in v[1:])
        assert t.source == state_a and satisfies_all(w, t.guard)
        v = apply_update(w, t.update)
        assert v == after
        state_a = t.target


def test_run_bijection():
    rng = random.Random(43)
    for _ in range(100):
        a = random_automaton(rng, committed=True)
        for _ in range(3):
            lift_and_project(a, rng)


def test_check_via_diagfree_maps_witness_back():
    a = Automaton(("x", "y"), ("p", "q", "r"), 0, (
        Transition(0, 1, (lower(X, 1),), UpdateMap.reset([Y])),
        Transition(1, 2, (diagonal(X, Y, 2, strict=True), lower(Y, 2))),
    ), frozenset({2}), frozenset())
    res = check_via_diagfree(a)
    assert res.verdict is Verdict.REACHABLE and res.witness == (0, 1)
