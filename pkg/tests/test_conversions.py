import random
from fractions import Fraction as F

import pytest

from advkit.boolfn import PartialFn, pror_fn, total_fn, xor_fn
from advkit.conversions import (adv_to_cadv_scheme, cadv_to_cfbs_witness,
                                cfbs_to_cadv_scheme, check_feasible,
                                witness_bundle_json)
from advkit.errors import InputError
from advkit.measures import (WeightScheme, adv, cadv, cfbs, cfbs_with_witness,
                             fbs, scheme_inputs)


def test_total_function_witness_is_identity_completion():
    f = xor_fn(2)
    res = cadv(f)
    comp, covers = cadv_to_cfbs_witness(f, res.scheme)
    assert comp.total == f.table
    for x in f.dom:
        for i in (1, 2):
            assert covers[x][i] == 2 * res.scheme.q[(x, i)]


def test_pror_witness_value_bound():
    f = pror_fn(2)
    res = cadv(f)
    comp, covers = cadv_to_cfbs_witness(f, res.scheme)
    value = max(sum(c.values()) for c in covers.values())
    assert value <= 2 * res.value
    assert cfbs(f) <= value


def test_infeasible_scheme_rejected():
    f = xor_fn(2)
    zero = WeightScheme(kind="cadv", n=2, q={}, inputs=scheme_inputs(f))
    with pytest.raises(InputError):
        cadv_to_cfbs_witness(f, zero)


def test_cfbs_to_cadv_both_factors():
    f = pror_fn(2)
    _, comp, covers = cfbs_with_witness(f)
    out = cfbs_to_cadv_scheme(f, comp, covers)
    assert out["factor2"]["feasible"]
    assert out["factor2"]["objective"] <= 2 * cfbs(f)
    # the undoubled variant is reported alongside with its own verdict
    assert set(out) == {"factor1", "factor2"}
    assert out["factor1"]["objective"] * 2 == out["factor2"]["objective"]


def test_parity_factor1_feasible():
    f = xor_fn(2)
    _, comp, covers = cfbs_with_witness(f)
    out = cfbs_to_cadv_scheme(f, comp, covers)
    assert out["factor1"]["feasible"]
    assert out["factor1"]["objective"] == 2


def test_broken_cover_rejected_with_block():
    f = xor_fn(2)
    _, comp, covers = cfbs_with_witness(f)
    bad = {x: {1: F(0), 2: F(0)} for x in f.dom}
    with pytest.raises(InputError) as err:
        cfbs_to_cadv_scheme(f, comp, bad)
    assert "block" in str(err.value)


def test_adv_to_cadv_examples():
    ident = total_fn(1, (0, 1))
    scheme = WeightScheme(kind="adv", n=1, q={(0, 1): F(1), (1, 1): F(1)},
                          inputs=(0, 1))
    out = adv_to_cadv_scheme(ident, scheme, F(1))
    assert all(v == 2 for v in out.q.values())
    assert check_feasible(ident, out) is None
    assert out.objective() == 2

    f = pror_fn(2)
    res = adv(f)
    out = adv_to_cadv_scheme(f, res.witness_primal, res.upper)
    assert check_feasible(f, out) is None
    assert out.objective() <= 2 * res.upper ** 2
    assert cadv(f).value <= out.objective()


def test_adv_to_cadv_bound_too_small():
    ident = total_fn(1, (0, 1))
    scheme = WeightScheme(kind="adv", n=1, q={(0, 1): F(1), (1, 1): F(1)},
                          inputs=(0, 1))
    with pytest.raises(InputError):
        adv_to_cadv_scheme(ident, scheme, F(1, 2))


def test_random_adv_schemes_always_convert(seeded_corpus=30):
    rng = random.Random(5)
    for _ in range(seeded_corpus):
        table = tuple(rng.choice((0, 1, None)) for _ in range(4))
        if all(v is None for v in table) or len({v for v in table if v is not None}) < 2:
            continue
        f = PartialFn(n=2, table=table)
        res = adv(f)
        out = adv_to_cadv_scheme(f, res.witness_primal, res.upper)
        assert check_feasible(f, out) is None
        assert out.objective() <= 2 * res.upper ** 2


def test_check_feasible_agrees_with_naive_on_random_schemes():
    rng = random.Random(9)
    f = xor_fn(2)
    from advkit.measures import constrained_pairs
    pairs = constrained_pairs(f)
    for _ in range(200):
        q = {(x, i): F(rng.randint(0, 8), 4) for x in f.dom for i in (1, 2)}
        scheme = WeightScheme(kind="cadv", n=2, q=q, inputs=f.dom)
        naive_ok = all(
            sum(min(q[(p.x, i)], q[(p.y, i)]) for i in p.indices) >= 1
            for p in pairs)
        assert (check_feasible(f, scheme) is None) == naive_ok


def test_witness_bundle_serializes():
    f = pror_fn(2)
    res = cadv(f)
    comp, covers = cadv_to_cfbs_witness(f, res.scheme)
    d = witness_bundle_json(f, comp, covers)
    assert len(d["completion"]) == 4
    assert set(d["covers"]) == {"00", "10", "01"}
