from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from helpers import depth, games, unravel
from rhbg.avgprop import check_average_property, fpre
from rhbg.catalog import layered_dag, strong_example, tie_family, two_cycle_game
from rhbg.core import GameError, Method, make_game
from rhbg.solver import (InvariantError, iterate_values, regime_count, solve, solve_dag, solve_enumerate,
                         solve_iterate)

LAYERED = {"v0_0": F(7, 8), "v0_1": 1, "v1_1": F(1, 2), "v0_2": 1, "v1_2": 1, "v2_2": 1, "v3_2": 0}


def test_dag_layered():
    th = solve_dag(layered_dag())
    assert th.values == LAYERED
    assert th.method is Method.DAG and th.exact


def test_dag_single_target():
    assert solve_dag(make_game(["t"], [], ["t"], 0)).values == {"t": 0}


def test_dag_strong_example():
    th = solve_dag(strong_example())
    assert th.values == {"a": F(7, 18), "b": F(5, 6), "c": F(1, 2), "t": 0, "s": 1}


def test_dag_rejects_cycle():
    with pytest.raises(GameError, match="cycle"):
        solve_dag(two_cycle_game("1/8"))


def test_iterate_two_cycle():
    th, state = solve_iterate(two_cycle_game("1/8"))
    assert abs(th["vleft"] - F(7, 10)) < F(1, 10**12)
    assert th["vleft"] >= F(7, 10)  # approached from above
    assert state.iteration == th.iterations
    th0, _ = solve_iterate(two_cycle_game(0))
    assert abs(th0["vleft"] - F(2, 3)) < F(1, 10**12)


def test_iterate_exact_at_quarter():
    th, state = solve_iterate(two_cycle_game("1/4"))
    assert th.residual == 0 and state.iteration <= 3
    assert (th["vleft"], th["vright"]) == (1, F(1, 2))


def test_iterate_bad_tol():
    with pytest.raises(GameError):
        solve_iterate(two_cycle_game(0), tol=0)


def test_iterate_budget_reported_not_raised():
    th, state = solve_iterate(two_cycle_game("1/8"), max_iters=3)
    assert state.iteration == 3 and th.residual > 0 and not th.exact


def test_enumerate_tie_family_takes_max():
    assert solve_enumerate(tie_family()).values == {"v0": 1, "v1": F(1, 2), "v2": 1, "v3": 0}


def test_enumerate_two_cycle():
    assert solve_enumerate(two_cycle_game("1/8")).values == {"vleft": F(7, 10), "v2": 1, "vright": F(3, 10), "v1": 0}


def test_enumerate_size_guard():
    g = two_cycle_game("1/8")
    with pytest.raises(GameError):
        solve_enumerate(g, limit=regime_count(g) - 1)


def test_solve_auto_dispatch():
    assert solve(layered_dag()).method is Method.DAG
    assert solve(two_cycle_game("1/8")).method is Method.ENUMERATE
    assert solve(two_cycle_game("1/8"), limit=1).method is Method.ITERATE


@settings(max_examples=60, deadline=None)
@given(games(max_vertices=5))
def test_unrolling_semantics(g):
    # f_n from the operator equals the DAG threshold of the depth-n unravelling
    for n in range(0, 7):
        th = solve_dag(unravel(g, n))
        f = iterate_values(g, n)
        assert all(f[v] == th[f"{v}@0"] for v in g.vertices)


@settings(max_examples=60, deadline=None)
@given(games(max_vertices=5))
def test_iteration_monotone(g):
    prev = iterate_values(g, 0)
    for n in range(1, 8):
        cur = iterate_values(g, n)
        assert all(cur[v] <= prev[v] for v in g.vertices)
        prev = cur


@settings(max_examples=60, deadline=None)
@given(games(max_vertices=5))
def test_enumerate_vs_iterate(g):
    ex = solve_enumerate(g)
    assert check_average_property(ex.values, g)
    it = solve_iterate(g)[0]
    for v in g.vertices:
        assert it[v] >= ex[v]
        assert it[v] - ex[v] <= F(1, 10**12)


@settings(max_examples=60, deadline=None)
@given(games(max_vertices=6, acyclic=True))
def test_dag_methods_agree(g):
    d = solve_dag(g)
    assert solve_enumerate(g).values == d.values
    th = solve_iterate(g, max_iters=depth(g) + 1)[0]
    assert th.values == d.values and th.residual == 0


@settings(max_examples=60, deadline=None)
@given(games(max_vertices=5))
def test_clamp_soundness(g):
    th = solve_enumerate(g)
    for v in g.non_sinks:
        p = fpre(th.values, v, g)
        if p < 0:
            assert th[v] == 0
        if p > 1:
            assert th[v] == 1


def test_invariant_error_is_not_a_domain_error():
    assert not issubclass(InvariantError, GameError)
