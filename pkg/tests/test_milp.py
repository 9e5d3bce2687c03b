from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from helpers import games
from rhbg.catalog import layered_dag, tie_family, two_cycle_game
from rhbg.core import GameError, make_game
from rhbg.milp import (MAX_BINARIES, build_milp, export_lp, parse_lp_summary, solve_milp_exhaustive,
                       solve_milp_threshold)
from rhbg.solver import solve_dag, solve_enumerate


def test_tie_family_model_shape():
    m = build_milp(tie_family())
    assert m.big_m == F(3, 2)  # wr_inv(1) at lambda 1/4
    assert len(m.binaries) == 8
    assert sorted(m.objective) == sorted(m.f(v) for v in ("v0", "v1", "v2", "v3"))


def test_tie_family_optimum():
    sol = solve_milp_exhaustive(build_milp(tie_family()))
    assert sol.values == {"v0": 1, "v1": F(1, 2), "v2": 1, "v3": 0}
    assert sol.objective == F(5, 2)
    assert set(sol.assignment.values()) <= {0, 1}


def test_layered_dag_objective():
    sol = solve_milp_exhaustive(build_milp(layered_dag()))
    assert sol.objective == F(43, 8)
    assert sol.values == solve_dag(layered_dag()).values


@pytest.mark.parametrize("lam, left, right", [
    ("0", F(2, 3), F(1, 3)), ("1/8", F(7, 10), F(3, 10)), ("1/4", 1, F(1, 2)), ("3/8", 1, F(1, 2)),
])
def test_two_cycle(lam, left, right):
    th = solve_milp_threshold(two_cycle_game(lam))
    assert (th["vleft"], th["vright"]) == (left, right)


def test_binary_guard():
    with pytest.raises(GameError):
        solve_milp_exhaustive(build_milp(tie_family()), max_binaries=7)
    assert MAX_BINARIES == 24


def test_sinks_only_model():
    g = make_game(["t", "s"], [], ["t"], "1/3")
    sol = solve_milp_exhaustive(build_milp(g))
    assert sol.values == {"t": 0, "s": 1} and not sol.assignment


def test_lp_export_structure():
    m = build_milp(tie_family())
    text = export_lp(m)
    lines = text.splitlines()
    assert lines[0].startswith("\\")
    assert lines[1].startswith("Maximize obj: f_v0 + f_v1")
    assert lines[-1] == "End"
    s = parse_lp_summary(text)
    assert s.objective_sense == "Maximize"
    assert s.constraints == m.row_count()
    assert s.binaries == len(m.binaries)
    assert s.bounds == len(m.continuous)


def test_lp_export_sanitizes_names():
    g = make_game(["a b", "a-b", "t"], [("a b", "t"), ("a-b", "a b"), ("a-b", "t")], ["t"], "1/8")
    text = export_lp(build_milp(g))
    body = text.split("Subject To", 1)[1]
    assert "a b" not in body and "a-b" not in body
    assert parse_lp_summary(text).constraints > 0


def test_lp_summary_rejects_garbage():
    with pytest.raises(ValueError):
        parse_lp_summary("Subject To\n x >= 1\nEnd\n")


@settings(max_examples=40, deadline=None)
@given(games(max_vertices=5))
def test_matches_enumeration(g):
    assert solve_milp_threshold(g).values == solve_enumerate(g).values
