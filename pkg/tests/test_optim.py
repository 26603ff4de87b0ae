from fractions import Fraction as F

import pytest

from advkit.boolfn import or_fn
from advkit.optim import (Constraint, GeomPair, LinearProgram, EQ, GE, LE,
                          check_geom_feasible, lp_to_text, solve_geom_min,
                          solve_lp_exact, verify_lp_certificate)
from oracles import packing_oracle, pror2_adv_grid_oracle


def test_min_two_vars():
    lp = LinearProgram(objective={"q1": F(1), "q2": F(1)}, sense="min",
                       constraints=(Constraint("c1", {"q1": F(1)}, GE, F(1)),
                                    Constraint("c2", {"q2": F(1)}, GE, F(1))))
    res = solve_lp_exact(lp)
    assert res.status == "optimal"
    assert res.value == 2
    assert res.witness_primal == {"q1": F(1), "q2": F(1)}
    assert verify_lp_certificate(lp, res)


def test_infeasible_certificate():
    lp = LinearProgram(objective={"q": F(1)}, sense="min",
                       constraints=(Constraint("a", {"q": F(1)}, LE, F(0)),
                                    Constraint("b", {"q": F(1)}, GE, F(1))))
    res = solve_lp_exact(lp)
    assert res.status == "infeasible"
    assert "farkas" in res.witness_dual


def test_unbounded_ray():
    lp = LinearProgram(objective={"x": F(1)}, sense="max",
                       constraints=(Constraint("a", {"x": F(1)}, GE, F(1)),))
    res = solve_lp_exact(lp)
    assert res.status == "unbounded"
    assert res.witness_dual["ray"]["x"] > 0


def test_fbs_dual_lp_or2_matches_packing_oracle():
    # max-form packing LP for the 2-bit OR at the all-zeros input
    lp = LinearProgram(
        objective={"w1": F(1), "w2": F(1), "w12": F(1)}, sense="max",
        constraints=(Constraint("i1", {"w1": F(1), "w12": F(1)}, LE, F(1)),
                     Constraint("i2", {"w2": F(1), "w12": F(1)}, LE, F(1))))
    res = solve_lp_exact(lp)
    assert res.value == packing_oracle(or_fn(2), 0) == 2
    # dual cover weights certify the same value
    assert sum(res.witness_dual.values()) == 2


def test_equality_and_free_vars():
    lp = LinearProgram(objective={"x": F(1), "y": F(1)}, sense="min",
                       constraints=(Constraint("e", {"x": F(1), "y": F(-1)}, EQ, F(3)),
                                    Constraint("g", {"x": F(1), "y": F(1)}, GE, F(1))),
                       free_vars=frozenset({"y"}))
    res = solve_lp_exact(lp)
    assert res.value == 1
    assert res.witness_primal["y"] == F(-1)


def test_lp_text_dump():
    lp = LinearProgram(objective={"x": F(1, 2)}, sense="min",
                       constraints=(Constraint("c", {"x": F(1)}, GE, F(1)),))
    text = lp_to_text(lp)
    assert "Minimize" in text and "1/2 x" in text and "c: 1 x >= 1" in text


def test_geom_xor1_value_one():
    res = solve_geom_min([0, 1], [GeomPair(0, 1, (1,))])
    assert res.gap_met
    assert res.lower <= 1 <= res.upper
    assert res.upper - res.lower < F(1, 1000)


def test_geom_and2_sqrt2():
    pairs = [GeomPair(3, 1, (2,)), GeomPair(3, 2, (1,)), GeomPair(3, 0, (1, 2))]
    res = solve_geom_min([0, 1, 2, 3], pairs)
    assert res.gap_met
    assert abs(float(res.upper) - 2 ** 0.5) < 1e-4
    assert abs(float(res.lower) - 2 ** 0.5) < 1e-4


def test_geom_pror2_matches_grid_oracle():
    pairs = [GeomPair(0, 1, (1,)), GeomPair(0, 2, (2,))]
    res = solve_geom_min([0, 1, 2], pairs)
    oracle = pror2_adv_grid_oracle()
    assert res.gap_met
    assert abs(float(res.upper) - oracle) < 1e-4
    assert abs(float(res.upper) - 2 ** 0.5) < 1e-4


def test_geom_lower_monotone_under_constraints():
    # adding a constraint never decreases the certified lower bound
    base = [GeomPair(0, 1, (1,))]
    more = base + [GeomPair(0, 2, (2,))]
    r1 = solve_geom_min([0, 1, 2], base)
    r2 = solve_geom_min([0, 1, 2], more)
    assert r2.lower >= r1.lower - F(1, 10 ** 6)


def test_geom_feasibility_checker():
    pairs = [GeomPair(0, 1, (1,))]
    ok = {(0, 1): F(1), (1, 1): F(1)}
    assert check_geom_feasible(ok, pairs) is None
    bad = {(0, 1): F(1, 4), (1, 1): F(1)}
    violated = check_geom_feasible(bad, pairs)
    assert violated is not None and (violated.x, violated.y) == (0, 1)


def test_primal_witness_independent_recheck():
    pairs = [GeomPair(3, 1, (2,)), GeomPair(3, 2, (1,)), GeomPair(3, 0, (1, 2))]
    res = solve_geom_min([0, 1, 2, 3], pairs)
    # re-evaluate all constraints from scratch on the returned scheme
    assert check_geom_feasible(res.witness_primal, pairs) is None
