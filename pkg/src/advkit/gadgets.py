"""Communication gadgets: the 4x4 mod-4 gadget, versatility verification,
correlated sampling from shared randomness, and block composition.

A gadget is versatile when it is flippable (a local permutation pair
negates its value everywhere), randomly self-reducible (a distribution
over local permutation pairs maps every input to the uniform distribution
over its value class), and non-trivial (contains a 2-bit AND submatrix).
All three properties are checked mechanically by exact enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .boolfn import BoolObject, PartialFn, Relation, popcount
from .errors import InputError, ResourceError

AND_TARGET = ((0, 0), (0, 1))
OR_TARGET = ((0, 1), (1, 1))


@dataclass(frozen=True)
class Gadget:
    """A finite two-party function as a dense 0/1 matrix over X x Y."""

    rows: tuple  # rows[x][y] in {0,1}

    @property
    def x_size(self) -> int:
        return len(self.rows)

    @property
    def y_size(self) -> int:
        return len(self.rows[0])

    def value(self, x: int, y: int) -> int:
        return self.rows[x][y]

    def preimage(self, v: int) -> list:
        return [(x, y) for x in range(self.x_size) for y in range(self.y_size)
                if self.rows[x][y] == v]

    def to_json_dict(self) -> dict:
        return {"X_size": self.x_size, "Y_size": self.y_size,
                "rows": ["".join(str(b) for b in row) for row in self.rows]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "Gadget":
        return cls(rows=tuple(tuple(int(ch) for ch in row) for row in d["rows"]))


@dataclass(frozen=True)
class SelfReduction:
    """A distribution over value-preserving permutation pairs whose image of
    any input is uniform over that input's value class."""

    support: tuple  # ((sigma_a tuple, sigma_b tuple, probability), ...)

    def __post_init__(self):
        total = sum((p for _, _, p in self.support), Fraction(0))
        if total != 1:
            raise InputError("self-reduction probabilities must sum to 1")


def ver() -> Gadget:
    """The 4x4 gadget with value 1 iff x + y is 2 or 3 modulo 4."""
    return Gadget(rows=tuple(tuple(1 if (x + y) % 4 in (2, 3) else 0
                                   for y in range(4)) for x in range(4)))


def find_subfunction(g: Gadget, target) -> Optional[dict]:
    """First ordered row/column pairs whose 2x2 submatrix equals the target.

    The returned encoding maps bit b of the first (second) argument to
    rows[b] (cols[b]). The search is exhaustive in lexicographic order.
    """
    tgt = tuple(tuple(int(v) for v in row) for row in target)
    for r0, r1 in itertools.permutations(range(g.x_size), 2):
        for c0, c1 in itertools.permutations(range(g.y_size), 2):
            if all(g.value((r0, r1)[a], (c0, c1)[b]) == tgt[a][b]
                   for a in range(2) for b in range(2)):
                return {"rows": (r0, r1), "cols": (c0, c1)}
    return None


def verify_flip(g: Gadget, sigma_a, sigma_b) -> bool:
    return all(g.value(sigma_a[x], sigma_b[y]) == 1 - g.value(x, y)
               for x in range(g.x_size) for y in range(g.y_size))


def flip_map(g: Gadget) -> Optional[tuple]:
    """A permutation pair negating the gadget everywhere, or None.

    For each candidate column permutation (lexicographic order), the row
    permutation is forced: row x must map to the row matching the permuted
    complement of row x. Search capped at |Y| <= 8.
    """
    if g.y_size > 8:
        raise ResourceError("flip search capped at |Y| <= 8")
    row_index = {}
    for x, row in enumerate(g.rows):
        row_index.setdefault(row, []).append(x)
    for sigma_b in itertools.permutations(range(g.y_size)):
        sigma_a = []
        used = set()
        ok = True
        for x in range(g.x_size):
            want = tuple(1 - g.rows[x][y] for y in range(g.y_size))
            # target row r must satisfy rows[r][sigma_b[y]] == want[y]
            unpermuted = [None] * g.y_size
            for y in range(g.y_size):
                unpermuted[sigma_b[y]] = want[y]
            cands = [r for r in row_index.get(tuple(unpermuted), []) if r not in used]
            if not cands:
                ok = False
                break
            sigma_a.append(cands[0])
            used.add(cands[0])
        if ok:
            return tuple(sigma_a), tuple(sigma_b)
    return None


def _image_counts(g: Gadget, support) -> dict:
    """For every start input, the multiset of images under the support."""
    counts = {}
    for x in range(g.x_size):
        for y in range(g.y_size):
            c = {}
            for sa, sb, _ in support:
                key = (sa[x], sb[y])
                c[key] = c.get(key, 0) + 1
            counts[(x, y)] = c
    return counts


def verify_self_reduction(g: Gadget, sr: SelfReduction) -> bool:
    """Exact check that every image distribution is uniform on its value class."""
    classes = {0: g.preimage(0), 1: g.preimage(1)}
    for x in range(g.x_size):
        for y in range(g.y_size):
            cls = classes[g.value(x, y)]
            target = Fraction(1, len(cls))
            dist = {}
            for sa, sb, p in sr.support:
                key = (sa[x], sb[y])
                dist[key] = dist.get(key, Fraction(0)) + p
            if set(dist) != set(cls):
                return False
            if any(v != target for v in dist.values()):
                return False
    return True


def _value_preserving(g: Gadget, sa, sb) -> bool:
    return all(g.value(sa[x], sb[y]) == g.value(x, y)
               for x in range(g.x_size) for y in range(g.y_size))


def self_reduction(g: Gadget) -> Optional[SelfReduction]:
    """Search for a verified random self-reduction.

    Strategy: (i) when the gadget depends only on x + y modulo |X|, try the
    shift family (x -> x+r, y -> y-r), alone and composed with one extra
    affine pair found by brute force; (ii) for |X|, |Y| <= 4, fall back to
    the uniform distribution over the full group of value-preserving pairs,
    which works exactly when the group's orbits are the value classes (and
    no distribution can do better, since every support element must
    preserve the value of every input). Every candidate is verified by
    exact image-distribution computation before being returned.
    """
    if g.x_size > 8 or g.y_size > 8:
        raise ResourceError("self-reduction search capped at sizes <= 8")
    n = g.x_size
    candidates = []
    if g.x_size == g.y_size and _is_sum_structured(g):
        shifts = [(tuple((x + r) % n for x in range(n)),
                   tuple((y - r) % n for y in range(n))) for r in range(n)]
        prob = Fraction(1, n)
        candidates.append(SelfReduction(support=tuple((sa, sb, prob)
                                                      for sa, sb in shifts)))
        for extra in _affine_pairs(n):
            if not _value_preserving(g, *extra):
                continue
            support = []
            prob = Fraction(1, 2 * n)
            for sa, sb in shifts:
                support.append((sa, sb, prob))
                comp_a = tuple(sa[extra[0][x]] for x in range(n))
                comp_b = tuple(sb[extra[1][y]] for y in range(n))
                support.append((comp_a, comp_b, prob))
            candidates.append(SelfReduction(support=tuple(support)))
    for cand in candidates:
        if verify_self_reduction(g, cand):
            return cand
    if g.x_size <= 4 and g.y_size <= 4:
        group = [(sa, sb)
                 for sa in itertools.permutations(range(g.x_size))
                 for sb in itertools.permutations(range(g.y_size))
                 if _value_preserving(g, sa, sb)]
        prob = Fraction(1, len(group))
        cand = SelfReduction(support=tuple((sa, sb, prob) for sa, sb in group))
        if verify_self_reduction(g, cand):
            return cand
    return None


def _is_sum_structured(g: Gadget) -> bool:
    n = g.x_size
    vals = {}
    for x in range(n):
        for y in range(n):
            s = (x + y) % n
            if vals.setdefault(s, g.value(x, y)) != g.value(x, y):
                return False
    return True


def _affine_pairs(n: int):
    for a in range(1, n):
        if _gcd(a, n) != 1:
            continue
        for b in range(n):
            for c in range(1, n):
                if _gcd(c, n) != 1:
                    continue
                for d in range(n):
                    yield (tuple((a * x + b) % n for x in range(n)),
                           tuple((c * y + d) % n for y in range(n)))


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def s_sample(g: Gadget, flip, sr: SelfReduction, s: tuple, ab: tuple,
             randomness: tuple) -> tuple:
    """Correlated sampling without communication from explicit randomness.

    One self-reduction draw (an index into the support) is applied per
    coordinate to the shared start input (a, b); the flip pair is then
    applied wherever s has a 1. Over uniform randomness the output is
    uniform on the tuples evaluating to s when g(a,b) = 0, and on those
    evaluating to the complement of s when g(a,b) = 1.
    """
    if flip is None or sr is None:
        raise InputError("s_sample needs both versatility witnesses")
    a, b = ab
    m = len(s)
    if len(randomness) != m:
        raise InputError("need one self-reduction draw per coordinate")
    fa, fb = flip
    xs, ys = [], []
    for j in range(m):
        sa, sb, _ = sr.support[randomness[j]]
        xj, yj = sa[a], sb[b]
        if s[j] == 1:
            xj, yj = fa[xj], fb[yj]
        xs.append(xj)
        ys.append(yj)
    return tuple(xs), tuple(ys)


def s_sample_distribution(g: Gadget, flip, sr: SelfReduction, s: tuple,
                          ab: tuple) -> dict:
    """Exact output distribution of s_sample over its randomness space."""
    m = len(s)
    dist = {}
    for draws in itertools.product(range(len(sr.support)), repeat=m):
        prob = Fraction(1)
        for j in draws:
            prob *= sr.support[j][2]
        out = s_sample(g, flip, sr, s, ab, draws)
        dist[out] = dist.get(out, Fraction(0)) + prob
    return dist


# ---------------------------------------------------------------------------
# Block composition
# ---------------------------------------------------------------------------

COMPOSE_CAP = 1 << 24


@dataclass(frozen=True)
class ComposedMatrix:
    """f composed with a gadget blockwise; entries may be 0/1, None
    (outside a partial domain), or a frozenset of valid symbols."""

    n: int
    gadget: Gadget
    entries: tuple  # entries[xbar][ybar], encoded base |X| / |Y|

    @property
    def x_size(self) -> int:
        return self.gadget.x_size ** self.n

    @property
    def y_size(self) -> int:
        return self.gadget.y_size ** self.n

    def encode_x(self, xs) -> int:
        code = 0
        for x in reversed(xs):
            code = code * self.gadget.x_size + x
        return code

    def encode_y(self, ys) -> int:
        code = 0
        for y in reversed(ys):
            code = code * self.gadget.y_size + y
        return code

    def value(self, xs, ys):
        return self.entries[self.encode_x(xs)][self.encode_y(ys)]

    def inner_string(self, xs, ys) -> int:
        z = 0
        for j in range(self.n):
            if self.gadget.value(xs[j], ys[j]):
                z |= 1 << j
        return z

    def to_gadget(self) -> Gadget:
        if any(v not in (0, 1) for row in self.entries for v in row):
            raise InputError("only total 0/1 compositions convert to a Gadget")
        return Gadget(rows=self.entries)


def decode_tuple(code: int, base: int, n: int) -> tuple:
    out = []
    for _ in range(n):
        out.append(code % base)
        code //= base
    return tuple(out)


def compose(obj: BoolObject, g: Gadget) -> ComposedMatrix:
    """Blockwise composition: entry (xbar, ybar) is obj applied to the
    string of per-coordinate gadget values."""
    n = obj.n
    xs_total = g.x_size ** n
    ys_total = g.y_size ** n
    if xs_total * ys_total > COMPOSE_CAP:
        raise ResourceError("composed matrix exceeds the size cap")
    is_partial = isinstance(obj, PartialFn)
    rows = []
    for xc in range(xs_total):
        xs = decode_tuple(xc, g.x_size, n)
        row = []
        for yc in range(ys_total):
            ys = decode_tuple(yc, g.y_size, n)
            z = 0
            for j in range(n):
                if g.value(xs[j], ys[j]):
                    z |= 1 << j
            if is_partial:
                row.append(obj.table[z])
            else:
                row.append(obj.valid[z])
        rows.append(tuple(row))
    return ComposedMatrix(n=n, gadget=g, entries=tuple(rows))


# ---------------------------------------------------------------------------
# The parity family of versatile gadgets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyGadget:
    gadget: Gadget
    n: int
    flip: tuple
    reduction: SelfReduction
    and_embedding: dict


def parity_family(n: int) -> FamilyGadget:
    """The n-th member of the universal versatile family: the parity of n
    independent copies of the base 4x4 gadget.

    Flippability comes from flipping the first copy; self-reducibility from
    negating a uniformly random even-size subset of copies and then
    randomizing each copy within its value class. Both witnesses and the
    AND submatrix are re-verified before returning.
    """
    if not 1 <= n <= 3:
        raise ResourceError("parity family capped at n <= 3")
    base = ver()
    from .boolfn import xor_fn
    composed = compose(xor_fn(n), base) if n > 1 else None
    gadget = composed.to_gadget() if n > 1 else base
    base_flip = flip_map(base)
    base_sr = self_reduction(base)
    if base_flip is None or base_sr is None:
        raise InputError("base gadget lost its versatility witnesses")

    size = 4 ** n
    fa = tuple(_apply_per_coord(code, n, 0, base_flip[0]) for code in range(size))
    fb = tuple(_apply_per_coord(code, n, 0, base_flip[1]) for code in range(size))
    if not verify_flip(gadget, fa, fb):
        raise InputError("constructed flip failed verification")

    support = []
    even_subsets = [s for s in range(1 << n) if popcount(s) % 2 == 0]
    sub_prob = Fraction(1, len(even_subsets))
    for subset in even_subsets:
        for draws in itertools.product(range(len(base_sr.support)), repeat=n):
            prob = sub_prob
            for d in draws:
                prob *= base_sr.support[d][2]
            perm_a = []
            perm_b = []
            for code in range(size):
                xs = list(decode_tuple(code, 4, n))
                for j in range(n):
                    sa, sb, _ = base_sr.support[draws[j]]
                    xs[j] = sa[xs[j]]
                    if (subset >> j) & 1:
                        xs[j] = base_flip[0][xs[j]]
                perm_a.append(_encode_tuple(xs, 4))
            for code in range(size):
                ys = list(decode_tuple(code, 4, n))
                for j in range(n):
                    sa, sb, _ = base_sr.support[draws[j]]
                    ys[j] = sb[ys[j]]
                    if (subset >> j) & 1:
                        ys[j] = base_flip[1][ys[j]]
                perm_b.append(_encode_tuple(ys, 4))
            support.append((tuple(perm_a), tuple(perm_b), prob))
    sr = SelfReduction(support=tuple(support))
    if not _verify_self_reduction_fast(gadget, sr):
        raise InputError("constructed self-reduction failed verification")
    emb = find_subfunction(gadget, AND_TARGET)
    if emb is None:
        raise InputError("AND submatrix not found")
    return FamilyGadget(gadget=gadget, n=n, flip=(fa, fb), reduction=sr,
                        and_embedding=emb)


def _apply_per_coord(code: int, n: int, coord: int, perm) -> int:
    xs = list(decode_tuple(code, 4, n))
    xs[coord] = perm[xs[coord]]
    return _encode_tuple(xs, 4)


def _encode_tuple(xs, base: int) -> int:
    code = 0
    for x in reversed(xs):
        code = code * base + x
    return code


def _verify_self_reduction_fast(g: Gadget, sr: SelfReduction) -> bool:
    """Uniform-support self-reductions verified by exact integer counting."""
    probs = {p for _, _, p in sr.support}
    if len(probs) != 1:
        return verify_self_reduction(g, sr)
    import numpy as np
    xs, ysz = g.x_size, g.y_size
    npoints = xs * ysz
    start_x, start_y = np.meshgrid(np.arange(xs), np.arange(ysz), indexing="ij")
    start_flat = np.arange(npoints)
    counts = np.zeros((npoints, npoints), dtype=np.int64)
    for sa, sb, _ in sr.support:
        img = np.asarray(sa)[start_x] * ysz + np.asarray(sb)[start_y]
        counts[start_flat, img.ravel()] += 1
    total = len(sr.support)
    class_flat = {v: np.array(sorted(x * ysz + y for (x, y) in g.preimage(v)))
                  for v in (0, 1)}
    for x in range(xs):
        for y in range(ysz):
            cls = class_flat[g.value(x, y)]
            if total % len(cls) != 0:
                return False
            want = total // len(cls)
            row = counts[x * ysz + y]
            if row.sum() != total or not np.all(row[cls] == want):
                return False
    return True


def versatility_report(g: Gadget) -> dict:
    """Machine-checkable versatility witnesses as a JSON-ready dict."""
    flip = flip_map(g)
    sr = self_reduction(g)
    and_emb = find_subfunction(g, AND_TARGET)
    or_emb = find_subfunction(g, OR_TARGET)
    report = {
        "gadget": g.to_json_dict(),
        "flippable": flip is not None,
        "flip": {"sigma_a": list(flip[0]), "sigma_b": list(flip[1])} if flip else None,
        "self_reducible": sr is not None,
        "self_reduction_support": len(sr.support) if sr else None,
        "and_embedding": and_emb,
        "or_embedding": or_emb,
        "versatile": flip is not None and sr is not None and and_emb is not None,
    }
    if flip is not None:
        report["flip_verified"] = verify_flip(g, *flip)
    if sr is not None:
        report["self_reduction_verified"] = verify_self_reduction(g, sr)
    return report
