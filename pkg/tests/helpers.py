"""Random instance generators and brute-force oracles shared by the test suites."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from tadiag._bounds import INF, LE_ZERO, LU_NEG, decode, encode
from tadiag.dbm import Dbm, canonicalize, elapse, from_constraints, intersect_raw, member, unconstrained
from tadiag.guards import GuardSet
from tadiag.model import Automaton, Constraint, Transition, UpdateMap
from tadiag.points import RationalSystem, solve

# -- constraints and zones ----------------------------------------------------


def random_constraint(rng: random.Random, n: int, cmax: int, diagonal: bool | None = None) -> Constraint:
    if diagonal is None:
        diagonal = n >= 2 and rng.random() < 0.4
    strict = rng.random() < 0.5
    if diagonal and n >= 2:
        x, y = rng.sample(range(1, n + 1), 2)
        return Constraint(x, y, strict, rng.randint(-cmax, cmax))
    x = rng.randint(1, n)
    c = rng.randint(0, cmax)
    if rng.random() < 0.5:
        return Constraint(x, 0, strict, c)
    return Constraint(0, x, strict, -c)


def random_zone(rng: random.Random, n: int, cmax: int = 6, k: int | None = None,
                allow_empty: bool = False) -> Dbm | None:
    """Zone from a few random constraints, sometimes time-elapsed."""
    for _ in range(100):
        cons = [random_constraint(rng, n, cmax) for _ in range(rng.randint(0, 2 * n) if k is None else k)]
        z = from_constraints(n, cons)
        if z is not None and rng.random() < 0.3:
            z = elapse(z)
        if z is not None or allow_empty:
            return z
    return unconstrained(n)


def random_guard_set(rng: random.Random, n: int, cmax: int = 6, max_diag: int = 3) -> GuardSet:
    cons = set()
    for _ in range(rng.randint(0, 2 * n)):
        cons.add(random_constraint(rng, n, cmax, diagonal=False))
    if n >= 2:
        for _ in range(rng.randint(0, max_diag)):
            cons.add(random_constraint(rng, n, cmax, diagonal=True))
    while sum(c.is_diagonal for c in cons) > max_diag:
        cons.remove(max(c for c in cons if c.is_diagonal))
    return GuardSet(cons, n)


def random_lu(rng: random.Random, n: int, cmax: int = 6):
    lo = np.array([LU_NEG] + [rng.choice([LU_NEG, rng.randint(0, cmax)]) for _ in range(n)], dtype=np.int64)
    hi = np.array([LU_NEG] + [rng.choice([LU_NEG, rng.randint(0, cmax)]) for _ in range(n)], dtype=np.int64)
    return lo, hi


def cubic_closure_of(z: Dbm, i: int, j: int, b: int) -> Dbm | None:
    """Reference intersection: tighten one entry, then run the full closure."""
    a = z.copy_array()
    a[i, j] = min(a[i, j], b)
    return canonicalize(a)


def scale_dbm(z: Dbm | None, k: int) -> Dbm | None:
    if z is None:
        return None
    a = z.copy_array()
    for i in range(a.shape[0]):
        for j in range(a.shape[0]):
            if a[i, j] < INF:
                strict, c = decode(int(a[i, j]))
                a[i, j] = encode(strict, c * k)
    return Dbm(a)


def scale_lu(arr: np.ndarray, k: int) -> np.ndarray:
    return np.where(arr >= 0, arr * k, arr)


def grid_point(z: Dbm, rng: random.Random, denom: int, span: int) -> tuple:
    """Random point of ``z`` whose coordinates are multiples of ``1/denom``."""
    system = RationalSystem.from_raw(z.m.tolist())

    def choose(lo, ls, hi, hs):
        lo = Fraction(0) if lo is None else Fraction(lo)
        top = lo + span if hi is None else Fraction(hi)
        cands = []
        start = int(lo * denom)
        stop = int(top * denom) + 1
        for t in range(start, stop + 1):
            p = Fraction(t, denom)
            if p < lo or (ls and p == lo):
                continue
            if hi is not None and (p > hi or (hs and p == hi)):
                continue
            if hi is None and p > top:
                continue
            cands.append(p)
        if not cands:
            # interval narrower than the grid: fall back to its midpoint
            return lo if not ls else (lo + (top if hi is not None else lo + 1)) / 2
        r = rng.random()
        if r < 0.25:
            return cands[0]
        if r < 0.5:
            return cands[-1]
        return rng.choice(cands)

    order = list(range(1, z.dim))
    rng.shuffle(order)
    vals = solve(system, order=order, choose=choose)
    assert vals is not None and member(z, tuple(vals)), "sampled point left the zone"
    return tuple(vals)


# -- LU oracles -----------------------------------------------------------------


def lu_box_nonempty(v, z2: Dbm | None, lo, hi) -> bool:
    """Exists v' in z2 with v ≼_LU v', by intersecting z2 with the per-clock box of v.

    ``v`` must have integer coordinates, as must the zone constants.
    """
    if z2 is None:
        return False
    z = z2
    for x in range(1, len(v)):
        vx = int(v[x])
        # v(x) < v'(x) needs U(x) < v(x): otherwise v'(x) <= v(x)
        if not (hi[x] < vx):
            z = intersect_raw(z, x, 0, encode(False, vx))
        # v'(x) < v(x) needs L(x) < v'(x)
        if lo[x] >= 0:
            if vx <= lo[x]:
                z = intersect_raw(z, 0, x, encode(False, -vx))
            else:
                z = intersect_raw(z, 0, x, encode(True, -int(lo[x])))
        if z is None:
            return False
    return True


def _add_raw(z: Dbm | None, i: int, j: int, b: int) -> Dbm | None:
    if z is None or b >= INF:
        return z
    if i == j:
        return z if b >= LE_ZERO else None
    return intersect_raw(z, i, j, b)


def lu_bad_region(z: Dbm | None, z2: Dbm | None, lo, hi) -> Dbm | None:
    """A non-empty sub-zone of ``z`` whose points have no LU-simulating point in ``z2``.

    For fixed v, the admissible v' form a box; the box meets canonical ``z2``
    unless a cycle through at most two box edges is negative. Splitting on
    which side of L(y) and U(x) the point lies makes each failure condition a
    difference constraint on v, so the failing points are a finite union of
    zones. Returns one of them, or None when ``z`` is simulated.
    """
    if z is None:
        return None
    if z2 is None:
        return z
    n = z.dim
    for x in range(n):
        # upper box edge v'(x) <= v(x), present when x == 0 or v(x) <= U(x)
        if x == 0:
            zx = z
        elif hi[x] >= 0:
            zx = _add_raw(z, x, 0, encode(False, int(hi[x])))
        else:
            continue
        if zx is None:
            continue
        for y in range(n):
            if y == x:
                continue
            c = int(z2.m[y, x])
            if c >= INF:
                continue
            strict_c, cv = decode(c)
            cases = []
            if y == 0 or lo[y] < 0:
                # lower edge v'(y) >= 0: bad iff v(x) - 0 <| -c negated
                cases.append(([], (x, 0, encode(not strict_c, -cv)) if x else None))
            else:
                ly = int(lo[y])
                # v(y) <= L(y): edge v'(y) >= v(y); bad iff v(x) - v(y) < -c (flipped)
                cases.append(([(y, 0, encode(False, ly))], (x, y, encode(not strict_c, -cv))))
                # v(y) > L(y): edge v'(y) > L(y); bad iff v(x) <= L(y) - c
                cases.append(([(0, y, encode(True, -ly))], (x, 0, encode(False, ly - cv))))
            for pattern, bad in cases:
                w = zx
                for i, j, b in pattern:
                    w = _add_raw(w, i, j, b)
                if bad is None:
                    # x == 0 and y == 0 side: cycle weight is c alone
                    if c < LE_ZERO:
                        return w
                    continue
                if w is not None:
                    i, j, b = bad
                    w = _add_raw(w, i, j, b)
                if w is not None:
                    return w
    return None


# -- automata -----------------------------------------------------------------


def random_automaton(rng: random.Random, max_clocks: int = 4, max_states: int = 6, max_diag: int = 3,
                     cmax: int = 5, committed: bool = False) -> Automaton:
    """Reset-only automaton whose diagonal guards come from a small pool."""
    n = rng.randint(1, max_clocks)
    q = rng.randint(2, max_states)
    pool = []
    if n >= 2:
        for _ in range(rng.randint(0, max_diag)):
            c = random_constraint(rng, n, cmax, diagonal=True)
            if c not in pool:
                pool.append(c)
    trans = []
    for _ in range(rng.randint(q, 3 * q)):
        s, t = rng.randrange(q), rng.randrange(q)
        guard = [random_constraint(rng, n, cmax, diagonal=False) for _ in range(rng.randint(0, 2))]
        if pool and rng.random() < 0.5:
            guard.append(rng.choice(pool))
        resets = [x for x in range(1, n + 1) if rng.random() < 0.35]
        trans.append(Transition(s, t, tuple(guard), UpdateMap.reset(resets)))
    for phi in pool:
        if not any(phi in t.guard for t in trans):
            k = rng.randrange(len(trans))
            t = trans[k]
            trans[k] = Transition(t.source, t.target, t.guard + (phi,), t.update)
    acc = frozenset({rng.randrange(1, q)}) if rng.random() < 0.9 else frozenset()
    com = frozenset(s for s in range(1, q) if committed and rng.random() < 0.2)
    return Automaton(tuple(f"c{i}" for i in range(1, n + 1)), tuple(f"q{i}" for i in range(q)), 0,
                     tuple(trans), acc, com)


def random_update(rng: random.Random, n: int, cmax: int, kinds=("keep", "const", "copy", "shift")) -> UpdateMap:
    items = []
    for x in range(1, n + 1):
        kind = rng.choice(kinds)
        if kind == "const":
            items.append((x, 0, rng.randint(0, cmax)))
        elif kind == "copy":
            items.append((x, rng.randint(1, n), 0))
        elif kind == "shift":
            items.append((x, rng.randint(1, n), rng.randint(-cmax, cmax)))
        elif kind == "shift+":
            items.append((x, rng.randint(1, n), rng.randint(0, cmax)))
    return UpdateMap.of(items)


def random_updateable(rng: random.Random, n: int, q: int, cmax: int, diagonals: bool, kinds) -> Automaton:
    trans = []
    for _ in range(rng.randint(q, 3 * q)):
        guard = [random_constraint(rng, n, cmax, diagonal=diagonals and n >= 2 and rng.random() < 0.5)
                 for _ in range(rng.randint(0, 2))]
        trans.append(Transition(rng.randrange(q), rng.randrange(q), tuple(guard),
                                random_update(rng, n, cmax, kinds)))
    return Automaton(tuple(f"c{i}" for i in range(1, n + 1)), tuple(f"q{i}" for i in range(q)), 0,
                     tuple(trans), frozenset({q - 1}), frozenset())


def random_run(a: Automaton, rng: random.Random, depth: int = 8, max_delay: int = 6):
    """A random concrete run: list of (delay, transition index, valuation after)."""
    from tadiag.model import apply_update, satisfies_all, zero_valuation

    v = tuple(Fraction(c) for c in zero_valuation(a.nclocks))
    q = a.initial
    run = []
    for _ in range(depth):
        options = []
        for _ in range(12):
            d = Fraction(0) if q in a.committed else Fraction(rng.randint(0, 2 * max_delay), 2)
            w = (v[0],) + tuple(c + d for c in v[1:])
            for ti in a.outgoing[q]:
                t = a.transitions[ti]
                if satisfies_all(w, t.guard) and apply_update(w, t.update) is not None:
                    options.append((d, ti, w))
            if options:
                break
        if not options:
            break
        d, ti, w = rng.choice(options)
        v = apply_update(w, a.transitions[ti].update)
        q = a.transitions[ti].target
        run.append((d, ti, v))
    return run
