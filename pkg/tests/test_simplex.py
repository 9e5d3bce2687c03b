from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from rhbg.simplex import LinearProgram, Status, presolve, simplex_max

scipy_optimize = pytest.importorskip("scipy.optimize")


def box(lo, hi):
    lp = LinearProgram()
    lp.add_variable("t", None, None)
    lp.add_constraint({"t": 1}, ">=", lo)
    lp.add_constraint({"t": 1}, "<=", hi)
    lp.objective = {"t": 1}
    return lp


def test_box_optimum():
    r = simplex_max(box(F(1, 2), 1))
    assert r.status is Status.OPTIMAL
    assert r.point["t"] == 1 and r.value == 1


def test_empty_box_infeasible():
    assert simplex_max(box(1, 0)).status is Status.INFEASIBLE


def test_unbounded():
    lp = LinearProgram()
    lp.add_variable("x")
    lp.add_variable("y")
    lp.add_constraint({"x": 1, "y": -1}, "<=", 1)
    lp.objective = {"x": 1, "y": 1}
    assert simplex_max(lp).status is Status.UNBOUNDED


def test_vacuous_identity_row():
    # f = f style row: no information, the box alone decides
    lp = box(F(1, 2), 1)
    lp.add_constraint({"t": 0}, "==", 0)
    assert simplex_max(lp).value == 1


def test_equalities_and_degeneracy():
    lp = LinearProgram()
    for n in "abc":
        lp.add_variable(n, 0, 1)
    lp.add_constraint({"a": 1, "b": 1, "c": 1}, "==", 1)
    lp.add_constraint({"a": 1, "b": -1}, "==", 0)
    lp.add_constraint({"a": 1, "b": 1}, "<=", 1)
    lp.add_constraint({"a": 1, "c": -1}, ">=", 0)
    lp.objective = {"a": 3, "c": 1}
    r = simplex_max(lp)
    assert r.status is Status.OPTIMAL
    assert r.point == {"a": F(1, 2), "b": F(1, 2), "c": F(0)}
    assert r.value == F(3, 2)


def test_duplicate_variable_rejected():
    lp = LinearProgram()
    lp.add_variable("x")
    with pytest.raises(ValueError):
        lp.add_variable("x")
    with pytest.raises(ValueError):
        lp.add_constraint({"y": 1}, "<=", 0)


coef = st.integers(-4, 4)


@st.composite
def small_lps(draw):
    k = draw(st.integers(1, 4))
    names = [f"x{i}" for i in range(k)]
    lp = LinearProgram()
    for n in names:
        lo = draw(st.sampled_from([None, 0, -2]))
        hi = draw(st.sampled_from([None, 3, 1]))
        lp.add_variable(n, lo, hi)
    for _ in range(draw(st.integers(0, 5))):
        cf = {n: draw(coef) for n in names}
        lp.add_constraint(cf, draw(st.sampled_from(["<=", ">=", "=="])), draw(st.integers(-5, 5)))
    lp.objective = {n: draw(coef) for n in names}
    return lp


def scipy_solve(lp):
    names = lp.variables
    c = [-float(lp.objective.get(n, 0)) for n in names]
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for con in lp.constraints:
        row = [0.0] * len(names)
        for n, v in con.coeffs:
            row[names.index(n)] = float(v)
        if con.sense == "==":
            A_eq.append(row)
            b_eq.append(float(con.rhs))
        elif con.sense == "<=":
            A_ub.append(row)
            b_ub.append(float(con.rhs))
        else:
            A_ub.append([-x for x in row])
            b_ub.append(-float(con.rhs))
    bounds = [tuple(None if b is None else float(b) for b in lp.bounds[n]) for n in names]
    return scipy_optimize.linprog(c, A_ub=A_ub or None, b_ub=b_ub or None, A_eq=A_eq or None,
                                  b_eq=b_eq or None, bounds=bounds, method="highs")


@settings(max_examples=300, deadline=None)
@given(small_lps())
def test_agrees_with_scipy(lp):
    ours = simplex_max(lp)
    ref = scipy_solve(lp)
    expected = {0: Status.OPTIMAL, 2: Status.INFEASIBLE, 3: Status.UNBOUNDED}[ref.status]
    assert ours.status is expected
    if expected is Status.OPTIMAL:
        assert lp.feasible(ours.point)
        assert ours.value == sum(c * ours.point[n] for n, c in lp.objective.items())
        assert abs(float(ours.value) + ref.fun) <= 1e-7


@settings(max_examples=100, deadline=None)
@given(small_lps(), small_lps())
def test_incremental_extension_matches_full_solve(a, b):
    # rows added through a presolved reduction give the same optimum as one big program
    if a.variables != b.variables:
        return
    full = a.copy()
    full.constraints = a.constraints + b.constraints
    red = presolve(a)
    if red is not None:
        red = red.extend([(dict(c.coeffs), c.sense, c.rhs) for c in b.constraints])
    direct = simplex_max(full)
    if red is None:
        assert direct.status is Status.INFEASIBLE
        return
    r = red.maximize(a.objective)
    assert r.status is direct.status
    if r.status is Status.OPTIMAL:
        assert r.value == direct.value
        assert full.feasible(r.point)
