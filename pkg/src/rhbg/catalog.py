"""Small named games shared by the tests and the notebooks."""
from __future__ import annotations

from .analysis import two_cycle_game
from .core import Game, make_game

__all__ = ["two_cycle_game", "layered_dag", "tie_family", "weak_example", "strong_example", "CATALOG"]

_STRONG_EDGES = [("a", "b"), ("a", "t"), ("b", "c"), ("b", "s"), ("c", "t"), ("c", "s")]


def layered_dag(lam="1/6") -> Game:
    """Two-layer DAG; vertex ``vi_j`` is vertex ``i`` of layer ``j``."""
    edges = [("v0_0", "v1_1"), ("v0_0", "v0_1"), ("v1_1", "v2_2"), ("v1_1", "v3_2"),
             ("v0_1", "v1_2"), ("v0_1", "v0_2")]
    return make_game(["v0_0", "v0_1", "v1_1", "v0_2", "v1_2", "v2_2", "v3_2"], edges, ["v3_2"], lam)


def tie_family(lam="1/4") -> Game:
    """A self-loop at ``v0`` makes every ``f(v0) = t`` satisfy the average property."""
    return make_game(["v0", "v1", "v2", "v3"], [("v0", "v0"), ("v0", "v1"), ("v1", "v2"), ("v1", "v3")], ["v3"], lam)


def strong_example(lam="1/8") -> Game:
    """DAG whose start vertex ``a`` has a 1-strong threshold."""
    return make_game(["a", "b", "c", "t", "s"], _STRONG_EDGES, ["t"], lam)


def weak_example(lam="1/8") -> Game:
    """``strong_example`` behind a self-looping entry ``v0`` whose threshold is weak."""
    return make_game(["v0", "a", "b", "c", "t", "s"], _STRONG_EDGES + [("v0", "v0"), ("v0", "a")], ["t"], lam)


CATALOG = {
    "two-cycle": two_cycle_game,
    "layered-dag": layered_dag,
    "tie-family": tie_family,
    "strong": strong_example,
    "weak": weak_example,
}
