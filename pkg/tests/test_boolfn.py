from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from advkit.boolfn import (Block, PartialFn, Relation, and_fn, completions,
                           completion_count, critical_inputs, flip_block,
                           input_str, minimal_sensitive_blocks, or_fn,
                           parse_fn, parse_input, parse_relation, pror_fn,
                           sensitive_blocks, to_relation, xor_fn)
from advkit.errors import DomainError, InputError, ResourceError


def blocks(f, x):
    return [frozenset(b) for b in sensitive_blocks(f, x)]


def test_flip_block_examples():
    # (000, {1,3}) -> 101
    assert input_str(flip_block(parse_input("000"), frozenset({1, 3}), 3), 3) == "101"
    # (11, {1,2}) -> 00
    assert input_str(flip_block(parse_input("11"), frozenset({1, 2}), 2), 2) == "00"


@given(st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(0, 2 ** n - 1),
                        st.sets(st.integers(1, n), min_size=1))))
def test_flip_block_involution_and_distance(args):
    n, x, bits = args
    block = frozenset(bits)
    y = flip_block(x, block, n)
    assert flip_block(y, block, n) == x
    assert bin(x ^ y).count("1") == len(block)


def test_flip_block_bad_index():
    with pytest.raises(InputError):
        flip_block(0, frozenset({3}), 2)


def test_sensitive_blocks_examples():
    assert blocks(or_fn(2), 0) == [frozenset({1}), frozenset({2}), frozenset({1, 2})]
    assert blocks(and_fn(2), 0) == [frozenset({1, 2})]
    assert blocks(pror_fn(2), 0) == [frozenset({1}), frozenset({2})]


def test_sensitive_blocks_domain_error():
    with pytest.raises(DomainError):
        sensitive_blocks(pror_fn(2), 3)


def test_minimal_sensitive_blocks_examples():
    assert minimal_sensitive_blocks(or_fn(2), 0) == [frozenset({1}), frozenset({2})]
    assert minimal_sensitive_blocks(and_fn(2), 0) == [frozenset({1, 2})]
    assert minimal_sensitive_blocks(xor_fn(2), 0) == [frozenset({1}), frozenset({2})]


def test_critical_inputs():
    rel = to_relation(pror_fn(2))
    assert critical_inputs(rel) == frozenset({0, 1, 2})
    total = to_relation(and_fn(2))
    assert critical_inputs(total) == frozenset(range(4))
    everything = Relation(n=1, sigma=(0, 1), valid=(frozenset({0, 1}),) * 2)
    assert critical_inputs(everything) == frozenset()


def test_to_relation_examples():
    rel = to_relation(and_fn(2))
    assert all(len(v) == 1 for v in rel.valid)
    rel = to_relation(pror_fn(2))
    assert rel.valid[3] == frozenset({0, 1})
    # critical inputs of the encoding equal the domain, exhaustively at n <= 3
    import itertools
    for n in (1, 2):
        for table in itertools.product((0, 1, None), repeat=1 << n):
            if all(v is None for v in table):
                continue
            f = PartialFn(n=n, table=table)
            assert critical_inputs(to_relation(f)) == frozenset(f.dom)


def test_completions_counts_and_distinct():
    assert len(list(completions(pror_fn(2)))) == 2
    assert len(list(completions(and_fn(2)))) == 1
    two_free = Relation(n=1, sigma=(0, 1),
                        valid=(frozenset({0, 1}), frozenset({0, 1})))
    combos = [c.total for c in completions(two_free)]
    assert len(combos) == 4 and len(set(combos)) == 4
    assert completion_count(two_free) == 4


def test_completions_cap():
    f = pror_fn(2)
    with pytest.raises(ResourceError):
        list(completions(f, cap=1))


def test_empty_domain_rejected():
    with pytest.raises(InputError):
        PartialFn(n=1, table=(None, None))


def test_parse_roundtrip():
    f = pror_fn(2)
    assert parse_fn(f.to_text()) == f
    rel = Relation(n=1, sigma=("a", "b"),
                   valid=(frozenset({"a"}), frozenset({"a", "b"})))
    assert parse_relation(rel.to_text()) == rel
    with pytest.raises(InputError):
        parse_fn("n=2;table=0,1")
    with pytest.raises(InputError):
        parse_fn("garbage")


def test_block_type_is_frozenset():
    assert Block is frozenset
