"""Seeded random-corpus invariants at the sizes the measures contract names:
a thousand partial functions on three bits and a thousand three-symbol
relations on two bits, checked against the full inequality chain."""

import random
from fractions import Fraction as F

import pytest

from advkit.boolfn import PartialFn, Relation, critical_inputs
from advkit.conversions import adv_to_cadv_scheme, cadv_to_cfbs_witness, check_feasible
from advkit.corpus import CorpusSpec, enumerate_corpus, _adeg_cadv_ok
from advkit.measures import (adv, adv1, approx_deg, bs, cadv, cbs, cfbs, fbs)

SAMPLE = 1000
TOL = F(1, 1000)


@pytest.mark.slow
def test_random_partial_functions_n3_invariants():
    spec = CorpusSpec("partial", 3, sample=(SAMPLE, 20260810))
    for f in enumerate_corpus(spec):
        b, fb = F(bs(f)), fbs(f)
        cb, cf = F(cbs(f)), cfbs(f)
        assert b <= fb <= cf
        assert b <= cb <= cf
        if f.is_total():
            assert cb == b
        cres = cadv(f)
        assert cres.value <= cf <= 2 * cres.value
        ares = adv(f)
        a1res = adv1(f)
        assert ares.lower - TOL <= cres.value <= 2 * ares.upper ** 2
        assert a1res.upper <= ares.upper + TOL
        for eps in (F(1, 3), F(1, 4)):
            d = F(approx_deg(f, eps))
            assert _adeg_cadv_ok(d, cres.value, eps)
        # construction round-trips stay feasible with their stated bounds
        comp, covers = cadv_to_cfbs_witness(f, cres.scheme)
        worst = max((sum(c.values()) for c in covers.values()), default=F(0))
        assert worst <= 2 * cres.value
        scaled = adv_to_cadv_scheme(f, ares.witness_primal, ares.upper)
        assert check_feasible(f, scaled) is None
        assert scaled.objective() <= 2 * ares.upper ** 2


@pytest.mark.slow
def test_random_relations_sigma3_n2_invariants():
    spec = CorpusSpec("relation", 2, sample=(SAMPLE, 31337), sigma_size=3)
    for rel in enumerate_corpus(spec):
        cb, cf = F(cbs(rel)), cfbs(rel)
        assert cb <= cf
        if not critical_inputs(rel):
            assert cb == cf == 0
        cres = cadv(rel)
        ares = adv(rel)
        a1res = adv1(rel)
        assert ares.lower - TOL <= cres.value <= 2 * ares.upper ** 2
        assert a1res.upper <= ares.upper + TOL
        scaled = adv_to_cadv_scheme(rel, ares.witness_primal, ares.upper)
        assert check_feasible(rel, scaled) is None
