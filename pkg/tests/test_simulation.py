import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tadiag._bounds import LU_NEG
from tadiag.dbm import elapse, from_constraints, includes, initial_zone, intersect, member, point_zone
from tadiag.guards import GuardSet
from tadiag.model import diagonal, lower, upper
from tadiag.simulation import (MAX_ORACLE_DIAGONALS, SimStats, val_sim_lu, val_sim_luglu, zone_sim_lu, zone_sim_lug,
                               zone_sim_lug_oracle)

from helpers import (grid_point, lu_bad_region, lu_box_nonempty, random_guard_set, random_lu, random_zone, scale_dbm,
                     scale_lu)

NEG = LU_NEG


def test_val_sim_lu_examples():
    lo, hi = [NEG, NEG], [NEG, 2]
    assert val_sim_lu((0, 3), (0, 5), lo, hi)       # both above U
    assert not val_sim_lu((0, 1), (0, 5), lo, hi)   # v below U must not grow
    assert val_sim_lu((0, 5), (0, 1), lo, hi)       # no lower bound: decreasing is free
    lo = [NEG, 3]
    assert not val_sim_lu((0, 5), (0, 3), lo, hi)   # w must stay above L
    assert val_sim_lu((0, 5), (0, 4), lo, hi)
    assert val_sim_lu((0, 2), (0, 2), lo, hi)


def test_val_sim_luglu_checks_diagonals():
    g = GuardSet([diagonal(1, 2, 1)], 2)
    assert val_sim_luglu((0, 3, 3), (0, 9, 9), g)
    assert not val_sim_luglu((0, 3, 3), (0, 9, 1), g)
    assert val_sim_luglu((0, 9, 1), (0, 3, 3), g)


def test_zone_sim_examples():
    z = intersect(initial_zone(2), upper(1, 4))
    big = initial_zone(2)
    g = GuardSet([upper(1, 3)], 2)
    assert zone_sim_lug(z, big, g) and zone_sim_lug(big, z, g)
    g = GuardSet([lower(1, 5)], 2)
    assert not zone_sim_lug(big, z, g)
    skew = from_constraints(2, [diagonal(1, 2, 2), diagonal(2, 1, -2)])
    g = GuardSet([diagonal(1, 2, 1)], 2)
    assert not zone_sim_lug(initial_zone(2), skew, g)
    assert zone_sim_lug(skew, initial_zone(2), g)
    assert zone_sim_lug(None, None, g) and not zone_sim_lug(big, None, g)


def _integer_queries(z, z2, lo, hi, rng, k):
    """Sample points of z; scale each with the query so that all coordinates are integers."""
    for _ in range(k):
        v = grid_point(z, rng, 2, 8)
        d = math.lcm(*(Fraction(c).denominator for c in v))
        yield tuple(int(c * d) for c in v), d, scale_dbm(z2, d), scale_lu(lo, d), scale_lu(hi, d)


def test_zone_sim_lu_against_exact_and_point_oracles():
    rng = random.Random(21)
    negatives = 0
    for _ in range(1500):
        n = rng.randint(1, 4)
        z, z2 = random_zone(rng, n), random_zone(rng, n)
        lo, hi = random_lu(rng, n)
        verdict = zone_sim_lu(z, z2, lo, hi)
        bad = lu_bad_region(z, z2, lo, hi)
        assert verdict == (bad is None)
        if verdict:
            for v, _, z2s, los, his in _integer_queries(z, z2, lo, hi, rng, 6):
                assert lu_box_nonempty(v, z2s, los, his)
        else:
            negatives += 1
            for v, d, z2s, los, his in _integer_queries(bad, z2, lo, hi, rng, 3):
                assert member(scale_dbm(z, d), v)
                assert not lu_box_nonempty(v, z2s, los, his)
    assert negatives > 200


def test_lug_matches_subset_oracle():
    rng = random.Random(22)
    for _ in range(1500):
        n = rng.randint(1, 4)
        g = random_guard_set(rng, n)
        z, z2 = random_zone(rng, n), random_zone(rng, n)
        st_ = SimStats()
        assert zone_sim_lug(z, z2, g, st_) == zone_sim_lug_oracle(z, z2, g)
        assert st_.calls <= 2 ** (len(g.diagonals) + 1) - 1


def test_oracle_refuses_many_diagonals():
    cons = [diagonal(1, 2, c) for c in range(-9, 9)]
    assert len(cons) > MAX_ORACLE_DIAGONALS
    with pytest.raises(ValueError):
        zone_sim_lug_oracle(initial_zone(2), initial_zone(2), GuardSet(cons, 2))


def test_call_bound_is_tight_for_worst_case():
    # z strictly larger than z2 only around the last split forces full recursion
    g = GuardSet([diagonal(1, 2, 0), diagonal(2, 1, 0)], 2)
    s = SimStats()
    zone_sim_lug(initial_zone(2), initial_zone(2), g, s)
    assert s.queries == 1 and 1 <= s.calls <= 7


zones = st.randoms(use_true_random=False)


@settings(max_examples=300)
@given(zones)
def test_reflexive(rnd):
    n = rnd.randint(1, 4)
    z, g = random_zone(rnd, n), random_guard_set(rnd, n)
    assert zone_sim_lug(z, z, g)


@settings(max_examples=300)
@given(zones)
def test_inclusion_implies_simulation(rnd):
    n = rnd.randint(1, 4)
    z, g = random_zone(rnd, n), random_guard_set(rnd, n)
    sub = random_zone(rnd, n)
    small = z
    for i in range(sub.dim):
        for j in range(sub.dim):
            if i != j and rnd.random() < 0.3:
                from tadiag.dbm import intersect_raw
                small = intersect_raw(small, i, j, int(sub.m[i, j])) if small is not None else None
    assert includes(z, small)
    assert zone_sim_lug(small, z, g)


@settings(max_examples=300)
@given(zones)
def test_transitive(rnd):
    n = rnd.randint(1, 3)
    g = random_guard_set(rnd, n, cmax=3, max_diag=2)
    z1, z2, z3 = (random_zone(rnd, n, cmax=3) for _ in range(3))
    if zone_sim_lug(z1, z2, g) and zone_sim_lug(z2, z3, g):
        assert zone_sim_lug(z1, z3, g)


@settings(max_examples=300)
@given(zones)
def test_compatible_with_elapse(rnd):
    n = rnd.randint(1, 4)
    g = random_guard_set(rnd, n)
    z1, z2 = random_zone(rnd, n), random_zone(rnd, n)
    if zone_sim_lug(z1, z2, g):
        assert zone_sim_lug(elapse(z1), elapse(z2), g)


@settings(max_examples=300)
@given(zones)
def test_fewer_guards_simulate_more(rnd):
    n = rnd.randint(1, 4)
    g = random_guard_set(rnd, n)
    z1, z2 = random_zone(rnd, n), random_zone(rnd, n)
    keep = [c for c in g if rnd.random() < 0.6]
    if zone_sim_lug(z1, z2, g):
        assert zone_sim_lug(z1, z2, GuardSet(keep, n))


def test_point_zones_follow_valuation_relation():
    rng = random.Random(23)
    for _ in range(500):
        n = rng.randint(1, 3)
        g = random_guard_set(rng, n, cmax=4)
        v = (0, *(rng.randint(0, 6) for _ in range(n)))
        w = (0, *(rng.randint(0, 6) for _ in range(n)))
        assert zone_sim_lug(point_zone(v), point_zone(w), g) == val_sim_luglu(v, w, g)
