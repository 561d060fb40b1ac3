"""Simulation checks between valuations and between zones.

``v ≼_LU v'`` is the classical lower/upper-bound simulation. The guard-based
relation ``⊑_G`` additionally requires every diagonal of ``G`` satisfied by
``v`` to be satisfied by ``v'``. On zones it is decided by splitting on one
diagonal at a time (``zone_sim_lug``); ``zone_sim_lug_oracle`` enumerates all
subsets of diagonals instead and serves as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from . import kernels
from .dbm import Dbm, intersect, intersect_all
from .guards import GuardSet
from .model import Constraint


@dataclass
class SimStats:
    """Counts simulation work: ``calls`` is recursion steps, ``lu_checks`` kernel calls."""

    calls: int = 0
    lu_checks: int = 0
    queries: int = 0


def val_sim_lu(v: Sequence, w: Sequence, lo: Sequence, hi: Sequence) -> bool:
    """``v ≼_LU w``; ``lo``/``hi`` use a negative value for -inf and ignore slot 0."""
    for x in range(1, len(v)):
        if w[x] < v[x] and not lo[x] < w[x]:
            return False
        if v[x] < w[x] and not hi[x] < v[x]:
            return False
    return True


def val_sim_luglu(v: Sequence, w: Sequence, guards: GuardSet) -> bool:
    lo, hi = guards.lu
    if not val_sim_lu(v, w, lo, hi):
        return False
    return all(phi.holds(w) for phi in guards.diagonals if phi.holds(v))


def zone_sim_lu(z: Dbm | None, z2: Dbm | None, lo: np.ndarray, hi: np.ndarray,
                stats: SimStats | None = None) -> bool:
    """Every valuation of ``z`` is LU-simulated by some valuation of ``z2``."""
    if z is None:
        return True
    if z2 is None:
        return False
    if stats is not None:
        stats.lu_checks += 1
    return bool(kernels.alu_le(z.m, z2.m, lo, hi))


def zone_sim_lug(z: Dbm | None, z2: Dbm | None, guards: GuardSet,
                 stats: SimStats | None = None) -> bool:
    """``z ⊑_G z2`` with the LU test standing in for the non-diagonal part.

    Diagonals are split in sorted order. ``stats.calls`` counts entries into
    the outer check plus every splitting step of the inner one, which is at
    most ``2^(d+1) - 1`` for ``d`` diagonals.
    """
    if stats is None:
        stats = SimStats()
    stats.queries += 1
    lo, hi = guards.lu
    return _check(z, z2, guards.diagonals, lo, hi, stats)


def _check(z, z2, diags: tuple[Constraint, ...], lo, hi, stats: SimStats) -> bool:
    stats.calls += 1
    if z is None:
        return True
    if z2 is None:
        return False
    if not zone_sim_lu(z, z2, lo, hi, stats):
        return False
    return _split(z, z2, diags, lo, hi, stats)


def _split(z, z2, diags: tuple[Constraint, ...], lo, hi, stats: SimStats) -> bool:
    if not diags:
        return True
    stats.calls += 1
    phi, rest = diags[0], diags[1:]
    outside = intersect(z, phi.negate())
    if outside is not None and not _split(outside, z2, rest, lo, hi, stats):
        return False
    return _check(intersect(z, phi), intersect(z2, phi), rest, lo, hi, stats)


MAX_ORACLE_DIAGONALS = 16


def zone_sim_lug_oracle(z: Dbm | None, z2: Dbm | None, guards: GuardSet) -> bool:
    """Subset enumeration: fails iff some set ``S`` of diagonals breaks the LU test on ``z∧S``, ``z2∧S``."""
    diags = guards.diagonals
    if len(diags) > MAX_ORACLE_DIAGONALS:
        raise ValueError(f"oracle refuses {len(diags)} diagonals (limit {MAX_ORACLE_DIAGONALS})")
    lo, hi = guards.lu
    for r in range(len(diags) + 1):
        for subset in combinations(diags, r):
            if not zone_sim_lu(intersect_all(z, subset), intersect_all(z2, subset), lo, hi):
                return False
    return True

