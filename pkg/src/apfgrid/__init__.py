"""Simulation of asynchronous luminous robots forming an arbitrary pattern on a grid."""

from .controller import TargetPattern, compute, order_targets
from .engine import Outcome, RunStats, check_move_bound, make_policy, run
from .geometry import GridPoint, visible_set
from .model import Configuration, Light, Move, is_solvable, pattern_formed

__all__ = [
    "Configuration", "GridPoint", "Light", "Move", "Outcome", "RunStats", "TargetPattern",
    "check_move_bound", "compute", "is_solvable", "make_policy", "order_targets",
    "pattern_formed", "run", "visible_set",
]
