from fractions import Fraction as F

from hypothesis import given, strategies as st

from helpers import games, lambdas, rationals01
from rhbg.avgprop import apply_average_operator, avg_triple, check_average_property, fpre, wr, wr_inv, wr_pair
from rhbg.catalog import layered_dag, tie_family, weak_example
from rhbg.core import make_game


def test_wr_values_from_losing_play():
    assert wr(F("0.6"), F(1, 8)) == F("0.575")
    assert wr(F("0.15"), F(1, 8)) == F("0.2375")
    assert wr(F(1, 3), F(0)) == F(1, 3)


def test_wr_inv_at_one_sixth():
    lam = F(1, 6)
    assert wr_inv(F(1, 2), lam) == F(1, 2)
    assert wr_inv(F(1), lam) == F(5, 4)
    assert wr_inv(F(2, 7), F(0)) == F(2, 7)


@given(rationals01, lambdas)
def test_wr_inverse_pair(x, lam):
    assert wr_inv(wr(x, lam), lam) == x
    assert wr(wr_inv(x, lam), lam) == x
    a, b = wr_pair(x, 1 - x, lam)
    assert a + b == 1
    assert lam <= wr(x, lam) <= 1 - lam


def test_avg_triple_layered_dag_root():
    g = layered_dag()
    f = {"v0_0": F(7, 8), "v0_1": 1, "v1_1": F(1, 2), "v0_2": 1, "v1_2": 1, "v2_2": 1, "v3_2": 0}
    t = avg_triple(f, "v0_0", g)
    assert (t.favg, t.fpre) == (F(3, 4), F(7, 8))
    assert t.fdiff == F(1, 4)


def test_avg_triple_single_neighbour():
    g = make_game(["a", "t"], [("a", "t")], ["t"], "1/8")
    t = avg_triple({"a": F(1, 8), "t": 0}, "a", g)
    assert t.vminus == t.vplus == "t"
    assert t.fdiff == 0 and t.favg == 0


def test_avg_triple_weak_entry():
    g = weak_example()
    f = {"v0": F(5, 18), "a": F(7, 18)}
    t = avg_triple(f | {"b": F(5, 6), "c": F(1, 2), "t": 0, "s": 1}, "v0", g)
    assert t.favg == F(1, 3) and t.fdiff == F(1, 18)
    assert fpre(f | {"b": 0, "c": 0, "t": 0, "s": 1}, "v0", g) == wr_inv(F(1, 3), g.lam)


def test_tie_family_all_hold():
    g = tie_family()
    for t in (F(0), F(1, 3), F(1)):
        assert check_average_property({"v0": t, "v1": F(1, 2), "v2": 1, "v3": 0}, g)


def test_tie_family_bad_value_flagged():
    g = tie_family()
    rep = check_average_property({"v0": 1, "v1": F(2, 5), "v2": 1, "v3": 0}, g)
    assert not rep
    assert "v1" in [v for v, _, _ in rep.violations]


def test_target_sink_must_be_zero():
    g = make_game(["a", "t"], [("a", "t")], ["t"], 0)
    rep = check_average_property({"a": 0, "t": 1}, g)
    assert "t" in [v for v, _, _ in rep.violations]


def test_fixed_point_of_operator():
    g = tie_family()
    f = {"v0": F(1), "v1": F(1, 2), "v2": F(1), "v3": F(0)}
    assert apply_average_operator(f, g) == f


def test_sinks_only_ignore_input():
    g = make_game(["t", "s"], [], ["t"], "1/5")
    assert apply_average_operator({"t": F(1, 2), "s": F(1, 3)}, g) == {"t": 0, "s": 1}


@given(games(), st.data())
def test_operator_monotone_and_bounded(g, data):
    f = {v: data.draw(rationals01) for v in g.vertices}
    h = {v: max(f[v], data.draw(rationals01)) for v in g.vertices}
    of, oh = apply_average_operator(f, g), apply_average_operator(h, g)
    for v in g.vertices:
        assert 0 <= of[v] <= 1
        assert of[v] <= oh[v]
    for v in g.sinks:
        assert of[v] == g.sink_value(v)
