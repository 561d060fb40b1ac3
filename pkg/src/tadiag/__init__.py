"""Reachability checking for timed automata with diagonal guards and clock updates."""

from .dbm import Dbm
from .diagfree import check_via_diagfree, eliminate_all, eliminate_diagonal, reach_diagfree
from .guards import GuardSet, GuardSetTable, compute_state_guards, lu_bounds, wp_nonneg, wp_reset, wp_update
from .model import Automaton, Constraint, ModelError, Transition, UpdateMap
from .parser import ParseError, parse_model, pretty_print
from .reach import ReachResult, Verdict, reach_dynamic, reach_static
from .simulation import zone_sim_lu, zone_sim_lug, zone_sim_lug_oracle

__all__ = [
    "Automaton", "Constraint", "Dbm", "GuardSet", "GuardSetTable", "ModelError", "ParseError",
    "ReachResult", "Transition", "UpdateMap", "Verdict", "check_via_diagfree", "compute_state_guards",
    "eliminate_all", "eliminate_diagonal", "lu_bounds", "parse_model", "pretty_print", "reach_diagfree",
    "reach_dynamic", "reach_static", "wp_nonneg", "wp_reset", "wp_update", "zone_sim_lu", "zone_sim_lug",
    "zone_sim_lug_oracle",
]
