import itertools
from fractions import Fraction as F

import pytest

from advkit.boolfn import (PartialFn, and_fn, maj_fn, or_fn, parse_input,
                           pror_fn, to_relation, xor_fn, Relation)
from advkit.errors import ResourceError
from advkit.measures import (adv, adv1, approx_deg, approx_deg_witness, bs,
                             bs_at, cadv, cbs, cfbs, check_cadv_feasible,
                             constrained_pairs, exact_deg, fbs, fbs_at)
from oracles import (bs_oracle, cbs_oracle, cfbs_oracle, fbs_vertex_oracle,
                     packing_oracle, scipy_degree_feasible)


def test_bs_examples():
    assert bs_at(or_fn(2), 0) == 2
    assert bs_at(and_fn(2), 0) == 1
    assert bs(xor_fn(3)) == bs_oracle(xor_fn(3)) == 3


def test_fbs_examples():
    assert fbs_at(or_fn(3), 0).value == 3
    assert fbs_at(and_fn(2), 0).value == 1
    r = fbs_at(maj_fn(3), parse_input("110"))
    assert r.value == fbs_vertex_oracle(maj_fn(3), parse_input("110"))


def test_fbs_witnesses_match_and_cover_all_blocks():
    f = maj_fn(3)
    for x in range(8):
        r = fbs_at(f, x)
        # primal objective equals dual objective
        assert sum(r.packing.values()) == sum(r.cover.values()) == r.value
        # packing loads within 1 and all weighted blocks sensitive
        from advkit.boolfn import sensitive_blocks
        sens = {frozenset(b) for b in sensitive_blocks(f, x)}
        for b, w in r.packing.items():
            if w:
                assert b in sens
        for i in range(1, 4):
            load = sum(w for b, w in r.packing.items() if i in b)
            assert load <= 1
        # dual covers every sensitive block (not only minimal ones)
        for b in sens:
            assert sum(r.cover.get(i, F(0)) for i in b) >= 1


def test_cbs_cfbs_examples():
    for f in (and_fn(2), xor_fn(2), or_fn(2), maj_fn(3)):
        assert cbs(f) == bs(f)
        assert cfbs(f) == fbs(f)
    assert cbs(pror_fn(2)) == cbs_oracle(pror_fn(2)) == 2
    assert cfbs(pror_fn(2)) == cfbs_oracle(pror_fn(2)) == 2
    no_crit = Relation(n=1, sigma=(0, 1), valid=(frozenset({0, 1}),) * 2)
    assert cbs(no_crit) == 0 and cfbs(no_crit) == 0


def test_cbs_completion_cap():
    with pytest.raises(ResourceError):
        cbs(pror_fn(2), cap=1)


def test_cadv_examples():
    for n in (1, 2, 3):
        assert cadv(xor_fn(n)).value == n
    res = cadv(pror_fn(2))
    assert res.value == 2
    assert res.scheme.q[(0, 1)] == 1 and res.scheme.q[(0, 2)] == 1
    assert cadv(and_fn(2)).value == 2
    assert check_cadv_feasible(and_fn(2), cadv(and_fn(2)).scheme) is None


def test_cadv_constant_function_is_zero():
    f = PartialFn(n=2, table=(1, 1, 1, 1))
    res = cadv(f)
    assert res.value == 0 and res.scheme.objective() == 0
    assert constrained_pairs(f) == []


def test_cadv_relation_form():
    # relation with disjoint-valid constraint structure
    rel = Relation(n=2, sigma=(0, 1, 2),
                   valid=(frozenset({0}), frozenset({1}),
                          frozenset({1, 2}), frozenset({0, 1, 2})))
    pairs = constrained_pairs(rel)
    assert {(p.x, p.y) for p in pairs} == {(0, 1), (0, 2)}
    res = cadv(rel)
    assert res.value == 2  # both of 00's coordinates are forced to weight 1


def test_adv_examples():
    res = adv(PartialFn(n=1, table=(0, 1)))
    assert res.gap_met and res.lower <= 1 <= res.upper
    res = adv(pror_fn(2))
    assert res.gap_met
    assert abs(float(res.upper) - 2 ** 0.5) < 1e-4
    res1 = adv1(xor_fn(2))
    res_full = adv(xor_fn(2))
    assert res1.gap_met
    assert abs(float(res1.upper) - 2) < 1e-3
    # every pair is at distance 1 here, so both programs agree
    assert abs(float(res1.upper) - float(res_full.upper)) < 1e-3


def test_deg_examples():
    assert exact_deg(and_fn(2)) == 2
    assert approx_deg(and_fn(2), F(1, 3)) == 1
    assert approx_deg(xor_fn(2), F(1, 3)) == 2
    # independent scipy feasibility oracle agrees degree by degree
    assert not scipy_degree_feasible(and_fn(2), 0, F(1, 3))
    assert scipy_degree_feasible(and_fn(2), 1, F(1, 3))
    assert not scipy_degree_feasible(xor_fn(2), 1, F(1, 3))
    assert scipy_degree_feasible(xor_fn(2), 2, F(1, 3))


def test_adeg_witness_properties():
    res = approx_deg_witness(and_fn(2), F(1, 3))
    w = res.witness
    for x in range(4):
        v = w.evaluate(x)
        assert 0 <= v <= 1
        assert abs(v - and_fn(2).value(x)) <= F(1, 3)
    # the rejected degree carries an infeasibility certificate
    assert res.rejections and res.rejections[0][0] == 0
    # the parity function's degree-1 rejection carries a Farkas certificate
    res = approx_deg_witness(xor_fn(2), F(1, 3))
    assert res.degree == 2
    assert [d for d, _ in res.rejections] == [0, 1]
    assert all(cert for _, cert in res.rejections)


def test_adeg_eps_validation():
    with pytest.raises(Exception):
        approx_deg(and_fn(2), F(1, 2))


def test_exhaustive_small_invariants():
    # every total function on 2 bits: exact chain comparisons
    for code in range(16):
        f = PartialFn(n=2, table=tuple((code >> x) & 1 for x in range(4)))
        b, fb, cb, cf = F(bs(f)), fbs(f), F(cbs(f)), cfbs(f)
        assert b <= fb <= cf
        assert b <= cb <= cf
        assert cb == b
        c = cadv(f).value
        assert c <= cf <= 2 * c


def test_minimal_block_packing_matches_full_oracle():
    # packing over minimal blocks only is value-preserving (n <= 3 exhaustive
    # over a structured family plus a seeded sample)
    import random
    rng = random.Random(11)
    fns = [or_fn(3), and_fn(3), xor_fn(3), maj_fn(3)]
    for _ in range(30):
        fns.append(PartialFn(n=3, table=tuple(rng.choice((0, 1)) for _ in range(8))))
    for f in fns:
        for x in f.dom:
            assert bs_at(f, x) == packing_oracle(f, x)
