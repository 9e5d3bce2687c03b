"""Exact thresholds and simulated plays for Robin Hood reachability bidding games."""
from .analysis import sweep, tau_closed_form, two_cycle_report
from .avgprop import apply_average_operator, check_average_property, wr, wr_inv
from .core import Configuration, Game, GameError, Method, Strength, ThresholdMap, make_game, parse_game
from .milp import build_milp, export_lp, solve_milp_exhaustive, solve_milp_threshold
from .simulator import run_play, strategy_avg_p1, strategy_avg_p2
from .solver import InvariantError, solve, solve_dag, solve_enumerate, solve_iterate
from .strength import classify

__version__ = "0.1.0"

__all__ = [
    "Configuration", "Game", "GameError", "InvariantError", "Method", "Strength", "ThresholdMap",
    "apply_average_operator", "build_milp", "check_average_property", "classify", "export_lp", "make_game",
    "parse_game", "run_play", "solve", "solve_dag", "solve_enumerate", "solve_iterate", "solve_milp_exhaustive",
    "solve_milp_threshold", "strategy_avg_p1", "strategy_avg_p2", "sweep", "tau_closed_form", "two_cycle_report",
    "wr", "wr_inv",
]
