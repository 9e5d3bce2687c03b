from fractions import Fraction as F

import pytest
from hypothesis import given

from helpers import lambdas, rationals01
from rhbg.analysis import (B_LEFT, CSV_HEADER, f_rev, forward_right, lambda_grid, matvec, max_jump, sweep,
                           matmul, sweep_csv, tau_closed_form, two_cycle_game, two_cycle_report, wr_matrix, x_fix)
from rhbg.catalog import layered_dag
from rhbg.core import GameError, Strength
from rhbg.solver import solve_dag

QUARTER = F(1, 4)


def test_quarter_is_identity():
    r = two_cycle_report(QUARTER)
    assert r.M == ((1, 0), (0, 1)) and r.eigenvalue2 == 1


def test_lambda_zero():
    r = two_cycle_report(0)
    assert (r.eigenvalue2, r.x_fix) == (4, F(2, 3))


def test_lambda_eighth():
    r = two_cycle_report(F(1, 8))
    assert (r.x_fix, r.f_rev_half) == (F(7, 10), F(5, 6))
    assert len(r.lines()) == 5


def test_report_rejects_bad_lambda():
    with pytest.raises(GameError):
        two_cycle_report(F(1, 2))


@given(lambdas)
def test_eigen_identities(lam):
    r = two_cycle_report(lam)  # check() runs inside
    (a, b), (c, d) = r.M
    assert a + d == 1 + r.eigenvalue2
    assert a * d - b * c == r.eigenvalue2
    assert matvec(r.M, (r.x_fix, 1 - r.x_fix)) == (r.x_fix, 1 - r.x_fix)


@given(rationals01, lambdas)
def test_f_rev_inverts_forward_map(x, lam):
    assert f_rev(forward_right(x, lam), lam) == x
    assert forward_right(f_rev(x, lam), lam) == x


@given(rationals01, lambdas)
def test_forward_map_is_first_row_of_half_cycle(x, lam):
    half = matmul(matmul(wr_matrix(lam), B_LEFT), wr_matrix(lam))
    assert matvec(half, (x, 1 - x))[0] == forward_right(x, lam)


@pytest.mark.parametrize("lam, want", [
    (0, (F(2, 3), Strength.ONE_STRONG)),
    (QUARTER, (1, Strength.ONE_STRONG)),
    (F(3, 8), (1, Strength.TWO_STRONG)),
])
def test_tau(lam, want):
    assert tau_closed_form(lam) == want


def test_x_fix_increasing_below_quarter():
    grid = lambda_grid(400, 0, QUARTER)
    vals = [x_fix(l) for l in grid]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[0] == F(2, 3) and vals[-1] < F(3, 4)


def test_grid():
    assert lambda_grid(8) == [F(i, 8) for i in range(4)]
    assert lambda_grid(10, F(1, 5), F(3, 10)) == [F(1, 5)]
    with pytest.raises(GameError):
        lambda_grid(0)


def test_sweep_two_cycle():
    rows = sweep(two_cycle_game(0), "vleft", [F(3, 8), 0, F(1, 8), F(1, 5), QUARTER], "enumerate")
    assert [r.lam for r in rows] == [0, F(1, 8), F(1, 5), QUARTER, F(3, 8)]
    assert [r.threshold for r in rows] == [F(2, 3), F(7, 10), F(8, 11), 1, 1]


def test_sweep_iterate_tracks_closed_form():
    grid = lambda_grid(40)
    rows = sweep(two_cycle_game(0), "vleft", grid, "iterate")
    for r in rows:
        assert abs(r.threshold - tau_closed_form(r.lam)[0]) <= F(1, 10**9)
        if r.lam == QUARTER:
            assert r.threshold == 1 and r.residual == 0


def test_single_point_dag_sweep():
    g = layered_dag(0)
    (row,) = sweep(g, "v0_0", [0], "iterate")
    assert row.threshold == solve_dag(g)["v0_0"]


def test_errors_reported_inline():
    rows = sweep(two_cycle_game(0), "vleft", [0, F(1, 8)], "dag")
    assert all(r.threshold is None and "cycle" in r.error for r in rows)
    assert "cycle" in sweep_csv(rows).splitlines()[1]


def test_unknown_vertex():
    with pytest.raises(GameError):
        sweep(two_cycle_game(0), "nope", [0])


def test_jump_near_quarter():
    eps = F(1, 1000)
    grid = [QUARTER - 2 * eps, QUARTER - eps, QUARTER, QUARTER + eps]
    jump, lo, hi = max_jump(sweep(two_cycle_game(0), "vleft", grid, "enumerate"))
    assert jump > QUARTER - eps and (lo, hi) == (QUARTER - eps, QUARTER)


def test_threads_preserve_order(monkeypatch):
    monkeypatch.setenv("RHBG_THREADS", "4")
    grid = lambda_grid(12)
    rows = sweep(two_cycle_game(0), "vleft", grid, "enumerate")
    assert [r.lam for r in rows] == grid


def test_csv_layout():
    rows = sweep(two_cycle_game(0), "vleft", [F(1, 8)], "enumerate")
    lines = sweep_csv(rows).splitlines()
    assert lines[0].split(",")[:4] == ["lambda", "threshold", "residual", "method"]
    assert lines[0].split(",") == CSV_HEADER
    assert lines[1].startswith("1/8,7/10,0,enumerate,0.125,0.7")
