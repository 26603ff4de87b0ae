"""Total/partial Boolean functions and relations over {0,1}^n.

Inputs are encoded as integers in [0, 2^n): bit i (1-based) of x is
(x >> (i-1)) & 1, so the string x_1 x_2 ... x_n written left to right has
x_1 in the least significant position. Truth tables are dense tuples
indexed by this integer encoding, which fixes every enumeration order.

Blocks are nonempty frozensets of 1-based indices; their enumeration order
is ascending in the integer mask sum(1 << (i-1) for i in B).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterator, Union

from .errors import DomainError, InputError, ResourceError

MAX_N = 16
COMPLETION_CAP = 1 << 20

Block = frozenset


def block_mask(block: frozenset, n: int) -> int:
    """Integer mask of a block of 1-based indices."""
    m = 0
    for i in block:
        if not 1 <= i <= n:
            raise InputError(f"block index {i} out of range [1, {n}]")
        m |= 1 << (i - 1)
    return m


def mask_block(mask: int) -> frozenset:
    """Block of 1-based indices from an integer mask."""
    return frozenset(i + 1 for i in range(mask.bit_length()) if (mask >> i) & 1)


def flip_block(x: int, block: frozenset, n: int) -> int:
    """Flip the bits of x listed in the block (an involution)."""
    if not 0 <= x < (1 << n):
        raise InputError(f"input {x} out of range for n={n}")
    return x ^ block_mask(block, n)


def input_str(x: int, n: int) -> str:
    """Render x as the string x_1 x_2 ... x_n."""
    return "".join(str((x >> i) & 1) for i in range(n))


def parse_input(s: str) -> int:
    """Parse a string x_1 x_2 ... x_n into the integer encoding."""
    x = 0
    for i, ch in enumerate(s):
        if ch == "1":
            x |= 1 << i
        elif ch != "0":
            raise InputError(f"invalid bit {ch!r} in input string")
    return x


@dataclass(frozen=True)
class PartialFn:
    """A (possibly partial) Boolean function given by a dense truth table.

    table has exactly 2^n entries from {0, 1, None}; None marks inputs
    outside the domain. The domain must be nonempty.
    """

    n: int
    table: tuple

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise InputError(f"n must be in [1, {MAX_N}]")
        if len(self.table) != 1 << self.n:
            raise InputError("table must have exactly 2^n entries")
        if not all(v in (0, 1, None) for v in self.table):
            raise InputError("table entries must be 0, 1, or None")
        if all(v is None for v in self.table):
            raise InputError("domain must be nonempty")

    @property
    def dom(self) -> tuple:
        return tuple(x for x, v in enumerate(self.table) if v is not None)

    def value(self, x: int) -> int:
        v = self.table[x]
        if v is None:
            raise DomainError(f"input {input_str(x, self.n)} not in domain")
        return v

    def in_dom(self, x: int) -> bool:
        return self.table[x] is not None

    def is_total(self) -> bool:
        return all(v is not None for v in self.table)

    def to_text(self) -> str:
        body = ",".join("*" if v is None else str(v) for v in self.table)
        return f"n={self.n};table={body}"


@dataclass(frozen=True)
class Relation:
    """A relation on {0,1}^n: each input gets a nonempty set of valid symbols."""

    n: int
    sigma: tuple
    valid: tuple  # tuple of frozensets, indexed by input encoding

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise InputError(f"n must be in [1, {MAX_N}]")
        if len(self.valid) != 1 << self.n:
            raise InputError("valid must have exactly 2^n entries")
        alphabet = set(self.sigma)
        for x, s in enumerate(self.valid):
            if not s:
                raise InputError(f"valid set empty at input {input_str(x, self.n)}")
            if not set(s) <= alphabet:
                raise InputError(f"symbols outside the alphabet at input {x}")

    def to_text(self) -> str:
        sig = ",".join(str(s) for s in self.sigma)
        body = "".join("{" + ",".join(sorted(str(s) for s in v)) + "}" for v in self.valid)
        return f"n={self.n};sigma={sig};valid={body}"


BoolObject = Union[PartialFn, Relation]


@dataclass(frozen=True)
class Completion:
    """A total choice function agreeing with its base on every constrained input."""

    base: BoolObject
    total: tuple

    def value(self, x: int) -> object:
        return self.total[x]


def sensitive_blocks(f: PartialFn, x: int) -> list:
    """All blocks B with x^B in the domain and a differing value, in mask order."""
    if not f.in_dom(x):
        raise DomainError(f"input {input_str(x, f.n)} not in domain")
    fx = f.table[x]
    out = []
    for mask in range(1, 1 << f.n):
        y = x ^ mask
        if f.table[y] is not None and f.table[y] != fx:
            out.append(mask_block(mask))
    return out


def _minimal_masks(masks: list) -> list:
    out = []
    for m in masks:
        if not any(o != m and o & m == o for o in masks):
            out.append(m)
    return out


def minimal_sensitive_blocks(f: PartialFn, x: int) -> list:
    """Inclusion-minimal sensitive blocks of x, in mask order."""
    masks = [block_mask(b, f.n) for b in sensitive_blocks(f, x)]
    return [mask_block(m) for m in sorted(_minimal_masks(masks))]


def sensitive_blocks_total(table: tuple, n: int, x: int) -> list:
    """Sensitive-block masks of x for a total (symbol-valued) table."""
    fx = table[x]
    return [mask for mask in range(1, 1 << n) if table[x ^ mask] != fx]


def critical_inputs(r: Relation) -> frozenset:
    """Inputs with a unique valid output symbol."""
    return frozenset(x for x, s in enumerate(r.valid) if len(s) == 1)


def to_relation(f: PartialFn) -> Relation:
    """Relational encoding: singleton sets on the domain, {0,1} elsewhere."""
    full = frozenset((0, 1))
    valid = tuple(full if v is None else frozenset((v,)) for v in f.table)
    return Relation(n=f.n, sigma=(0, 1), valid=valid)


def as_relation(obj: BoolObject) -> Relation:
    return to_relation(obj) if isinstance(obj, PartialFn) else obj


def completion_count(obj: BoolObject) -> int:
    rel = as_relation(obj)
    return reduce(lambda a, s: a * len(s), rel.valid, 1)


def completions(obj: BoolObject, cap: int = COMPLETION_CAP) -> Iterator[Completion]:
    """Yield every completion exactly once, in a deterministic order.

    Free inputs are filled in ascending input order; the choices at each
    input are tried in sorted symbol order.
    """
    rel = as_relation(obj)
    count = completion_count(rel)
    if count > cap:
        raise ResourceError(f"{count} completions exceed the cap of {cap}")
    choice_lists = [sorted(s, key=repr) for s in rel.valid]
    for combo in itertools.product(*choice_lists):
        yield Completion(base=obj, total=tuple(combo))


def total_fn(n: int, values) -> PartialFn:
    """Build a total PartialFn from an iterable of 2^n values."""
    return PartialFn(n=n, table=tuple(int(v) for v in values))


def fn_from_predicate(n: int, pred) -> PartialFn:
    return total_fn(n, (1 if pred(x) else 0 for x in range(1 << n)))


def popcount(x: int) -> int:
    return bin(x).count("1")


def or_fn(n: int) -> PartialFn:
    return fn_from_predicate(n, lambda x: x != 0)


def and_fn(n: int) -> PartialFn:
    return fn_from_predicate(n, lambda x: x == (1 << n) - 1)


def xor_fn(n: int) -> PartialFn:
    return fn_from_predicate(n, lambda x: popcount(x) % 2 == 1)


def maj_fn(n: int) -> PartialFn:
    return fn_from_predicate(n, lambda x: 2 * popcount(x) > n)


def identity_fn() -> PartialFn:
    return total_fn(1, (0, 1))


def pror_fn(k: int) -> PartialFn:
    """Promise-OR on k bits: defined on Hamming weights 0 and 1 only."""
    table = []
    for x in range(1 << k):
        w = popcount(x)
        table.append(0 if w == 0 else (1 if w == 1 else None))
    return PartialFn(n=k, table=tuple(table))


_TABLE_RE = re.compile(r"^n=(\d+);table=([01*](?:,[01*])*)$")
_REL_RE = re.compile(r"^n=(\d+);sigma=([^;]+);valid=((?:\{[^{}]*\})+)$")


def parse_fn(line: str) -> PartialFn:
    """Parse the text truth-table format n=<k>;table=<entries>."""
    m = _TABLE_RE.match(line.strip())
    if not m:
        raise InputError(f"malformed truth-table line: {line!r}")
    n = int(m.group(1))
    entries = m.group(2).split(",")
    if len(entries) != 1 << n:
        raise InputError(f"expected {1 << n} table entries, got {len(entries)}")
    table = tuple(None if e == "*" else int(e) for e in entries)
    return PartialFn(n=n, table=table)


def parse_relation(line: str) -> Relation:
    """Parse the relation format n=<k>;sigma=<symbols>;valid=<set-literals>."""
    m = _REL_RE.match(line.strip())
    if not m:
        raise InputError(f"malformed relation line: {line!r}")
    n = int(m.group(1))
    sigma = tuple(m.group(2).split(","))
    literals = re.findall(r"\{([^{}]*)\}", m.group(3))
    if len(literals) != 1 << n:
        raise InputError(f"expected {1 << n} valid sets, got {len(literals)}")
    valid = []
    for lit in literals:
        items = [s for s in lit.split(",") if s != ""]
        valid.append(frozenset(items))
    return Relation(n=n, sigma=sigma, valid=tuple(valid))


def parse_object(line: str) -> BoolObject:
    return parse_relation(line) if ";sigma=" in line else parse_fn(line)
