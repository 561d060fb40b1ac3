from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tadiag.model import (Automaton, Constraint, ModelError, Transition, UpdateMap, apply_update, diagonal,
                          elapse, lower, satisfies, upper, zero_valuation)


def test_satisfies_examples():
    assert satisfies((0, 0, 0), diagonal(1, 2, 0))
    assert not satisfies((0, 3), upper(1, 3, strict=True))
    assert satisfies((0, 3), upper(1, 3))
    assert not satisfies((0, 5, 1), diagonal(1, 2, 3))
    assert satisfies((0, 2), lower(1, 2)) and not satisfies((0, 2), lower(1, 2, strict=True))


def test_apply_update_examples():
    assert apply_update((0, 2, 7), UpdateMap.of({1: (2, 1)})) == (0, 8, 7)
    assert apply_update((0, 2), UpdateMap.of({1: (1, -3)})) is None
    assert apply_update((0, 2, 7), UpdateMap.of({1: (2, 0), 2: (1, 0)})) == (0, 7, 2)


def test_elapse_examples():
    assert elapse((0, 0, 0), 0) == (0, 0, 0)
    assert elapse((0, 1, 2), Fraction(3, 2)) == (0, Fraction(5, 2), Fraction(7, 2))
    with pytest.raises(ValueError):
        elapse((0, 1), -1)


def test_constraint_conventions():
    with pytest.raises(ModelError):
        Constraint(1, 0, False, -1)  # x <= -1
    with pytest.raises(ModelError):
        Constraint(0, 1, True, 5)  # -5 < x
    with pytest.raises(ModelError):
        Constraint(2, 2, False, 0)
    assert diagonal(1, 2, -4).is_diagonal and not upper(1, 4).is_diagonal
    phi = diagonal(1, 2, 5)
    assert phi.negate() == Constraint(2, 1, True, -5)
    assert phi.negate().negate() == phi


def test_update_map_validation():
    with pytest.raises(ModelError):
        UpdateMap.of([(1, 0, 0), (1, 0, 2)])
    with pytest.raises(ModelError):
        UpdateMap.of([(1, 0, -1)])
    with pytest.raises(ModelError):
        UpdateMap.of([(0, 0, 1)])
    assert not UpdateMap.of([(1, 1, 0)])
    up = UpdateMap.of([(2, 0, 0), (1, 0, 0)])
    assert up.is_reset_only and up.reset_set == {1, 2}


def test_automaton_validation():
    with pytest.raises(ModelError):
        Automaton(("x",), ("a",), 1, (), frozenset(), frozenset())
    with pytest.raises(ModelError):
        Automaton(("x",), ("a",), 0, (Transition(0, 3),), frozenset(), frozenset())


valuations = st.lists(st.fractions(min_value=0, max_value=20, max_denominator=4), min_size=2, max_size=4)


@given(valuations, st.fractions(min_value=0, max_value=10, max_denominator=4), st.integers(-6, 6), st.data())
def test_diagonals_invariant_under_elapse(vals, delta, c, data):
    v = (0, *vals)
    x, y = data.draw(st.lists(st.integers(1, len(vals)), min_size=2, max_size=2, unique=True))
    phi = diagonal(x, y, c, data.draw(st.booleans()))
    assert satisfies(v, phi) == satisfies(elapse(v, delta), phi)


@given(valuations, st.randoms(use_true_random=False))
def test_update_is_order_independent(vals, rnd):
    n = len(vals)
    v = (0, *vals)
    items = []
    for x in range(1, n + 1):
        kind = rnd.randrange(3)
        if kind == 0:
            items.append((x, 0, rnd.randint(0, 5)))
        elif kind == 1:
            items.append((x, rnd.randint(1, n), rnd.randint(-3, 3)))
    ref = apply_update(v, UpdateMap.of(items))
    for _ in range(3):
        rnd.shuffle(items)
        assert apply_update(v, UpdateMap.of(items)) == ref
        # reference: evaluate every right-hand side on the old valuation first
        new = list(v)
        ok = True
        for x, src, off in items:
            val = v[src] + off
            ok &= val >= 0
            new[x] = val
        assert (ref is None) == (not ok)
        if ok:
            assert ref == tuple(new)


def test_zero_valuation():
    assert zero_valuation(3) == (0, 0, 0, 0)
