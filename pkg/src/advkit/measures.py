"""Query-complexity measures for small Boolean functions and relations.

Block-sensitivity family (bs, fbs, cbs, cfbs), adversary family
(classical adversary by exact LP, positive and singleton adversaries by
certified convex sandwich), and the degree family (deg, adeg by exact
feasibility LPs over multilinear coefficients).

All exact values are Fractions; packing computations run over minimal
sensitive blocks, which is sound because every sensitive block contains a
minimal one and shrinking blocks preserves disjointness and only lowers
coordinate loads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional, Union

from .boolfn import (BoolObject, PartialFn, Relation, as_relation, completions,
                     completion_count, critical_inputs, input_str, mask_block,
                     minimal_sensitive_blocks, popcount, sensitive_blocks)
from .errors import DomainError, InputError, ResourceError
from .optim import (CertifiedValue, Constraint, GeomPair, LinearProgram, EQ, GE, LE,
                    solve_geom_min, solve_lp_exact)
from .poly import MultiPoly

BS_MAX_N = 5
DEFAULT_COMPLETION_CAP = 1 << 20

# a BlockWeighting maps sensitive blocks (frozensets of 1-based indices) to
# nonnegative weights at a fixed input; a CoverScheme maps coordinates to
# nonnegative weights covering every sensitive block to total at least 1
BlockWeighting = dict
CoverScheme = dict


@dataclass(frozen=True)
class WeightScheme:
    """Nonnegative weights q(x, i); the primal object of the adversary bounds."""

    kind: str                 # 'adv' | 'cadv' | 'adv1'
    n: int
    q: dict                   # (input, index) -> Fraction
    inputs: tuple             # the inputs the scheme is defined on

    def row_sum(self, x) -> Fraction:
        return sum((self.q.get((x, i), Fraction(0)) for i in range(1, self.n + 1)),
                   Fraction(0))

    def objective(self) -> Fraction:
        return max((self.row_sum(x) for x in self.inputs), default=Fraction(0))


class FbsResult(NamedTuple):
    value: Fraction
    packing: dict     # Block -> weight (the BlockWeighting primal witness)
    cover: dict       # index -> weight (the CoverScheme dual witness)


class CadvResult(NamedTuple):
    value: Fraction
    scheme: WeightScheme


class DegResult(NamedTuple):
    degree: int
    witness: MultiPoly
    rejections: tuple  # (degree, farkas certificate) for each infeasible degree


# ---------------------------------------------------------------------------
# Block sensitivity family
# ---------------------------------------------------------------------------

def _check_bs_size(n: int):
    if n > BS_MAX_N:
        raise ResourceError(f"n={n} exceeds the exact packing cap {BS_MAX_N}")


def _max_packing(masks: list) -> int:
    """Maximum number of pairwise disjoint masks, by branch and bound."""
    masks = sorted(masks, key=lambda m: (popcount(m), m))
    best = 0

    def rec(idx: int, used: int, count: int):
        nonlocal best
        if count + (len(masks) - idx) <= best:
            return
        if idx == len(masks):
            best = max(best, count)
            return
        m = masks[idx]
        if not m & used:
            rec(idx + 1, used | m, count + 1)
        rec(idx + 1, used, count)

    rec(0, 0, 0)
    return best


def bs_at(f: PartialFn, x: int) -> int:
    """Maximum cardinality of a disjoint family of sensitive blocks at x."""
    _check_bs_size(f.n)
    blocks = minimal_sensitive_blocks(f, x)
    return _max_packing([sum(1 << (i - 1) for i in b) for b in blocks])


def bs(f: PartialFn) -> int:
    return max(bs_at(f, x) for x in f.dom)


def _bs_from_masks(block_masks: tuple) -> int:
    minimal = [m for m in block_masks
               if not any(o != m and o & m == o for o in block_masks)]
    return _max_packing(minimal)


@lru_cache(maxsize=100_000)
def _fbs_from_masks(block_masks: tuple, n: int) -> tuple:
    """LP value and witnesses for a minimal-sensitive-block family.

    Cached by the block family, which collapses most repeated completions.
    """
    if not block_masks:
        return (Fraction(0), (), ())
    variables = {m: f"w{m}" for m in block_masks}
    cons = []
    for i in range(1, n + 1):
        touching = {variables[m]: Fraction(1) for m in block_masks if (m >> (i - 1)) & 1}
        if touching:
            cons.append(Constraint(f"load{i}", touching, LE, Fraction(1)))
    lp = LinearProgram(objective={v: Fraction(1) for v in variables.values()},
                       sense="max", constraints=tuple(cons))
    res = solve_lp_exact(lp)
    packing = tuple((m, res.witness_primal.get(variables[m], Fraction(0)))
                    for m in block_masks)
    cover = tuple((int(c.name[4:]), res.witness_dual[c.name]) for c in cons)
    return (res.value, packing, cover)


def fbs_at(f: PartialFn, x: int) -> FbsResult:
    """Exact fractional block sensitivity at x with primal and dual witnesses."""
    _check_bs_size(f.n)
    blocks = minimal_sensitive_blocks(f, x)
    masks = tuple(sorted(sum(1 << (i - 1) for i in b) for b in blocks))
    value, packing, cover = _fbs_from_masks(masks, f.n)
    return FbsResult(value=value,
                     packing={mask_block(m): w for m, w in packing},
                     cover=dict(cover))


def fbs(f: PartialFn) -> Fraction:
    return max(fbs_at(f, x).value for x in f.dom)


def _minimal_mask_family(table: tuple, n: int, x: int) -> tuple:
    fx = table[x]
    masks = [m for m in range(1, 1 << n) if table[x ^ m] != fx]
    return tuple(sorted(m for m in masks
                        if not any(o != m and o & m == o for o in masks)))


def _critical_minmax(obj: BoolObject, fractional: bool,
                     cap: int = DEFAULT_COMPLETION_CAP):
    """min over completions of max over critical inputs of (f)bs at the input."""
    rel = as_relation(obj)
    _check_bs_size(rel.n)
    crit = sorted(critical_inputs(rel))
    zero = Fraction(0) if fractional else 0
    if not crit:
        return zero, None
    if completion_count(rel) > cap:
        raise ResourceError(
            f"{completion_count(rel)} completions exceed the cap of {cap}")
    best = None
    best_completion = None
    for comp in completions(rel, cap=cap):
        cur = zero
        for x in crit:
            fam = _minimal_mask_family(comp.total, rel.n, x)
            val = _fbs_from_masks(fam, rel.n)[0] if fractional else _max_packing(list(fam))
            if val > cur:
                cur = val
            if best is not None and cur >= best:
                break
        if best is None or cur < best:
            best, best_completion = cur, comp
    return best, best_completion


def cbs(obj: BoolObject, cap: int = DEFAULT_COMPLETION_CAP) -> int:
    """Critical block sensitivity: min over completions, max over critical inputs."""
    value, _ = _critical_minmax(obj, fractional=False, cap=cap)
    return int(value)


def cfbs(obj: BoolObject, cap: int = DEFAULT_COMPLETION_CAP) -> Fraction:
    """Critical fractional block sensitivity."""
    value, _ = _critical_minmax(obj, fractional=True, cap=cap)
    return Fraction(value)


def cfbs_with_witness(obj: BoolObject, cap: int = DEFAULT_COMPLETION_CAP):
    """cfbs value together with an optimal completion and per-input covers."""
    value, comp = _critical_minmax(obj, fractional=True, cap=cap)
    if comp is None:
        return Fraction(value), None, {}
    rel = as_relation(obj)
    covers = {}
    for x in sorted(critical_inputs(rel)):
        fam = _minimal_mask_family(comp.total, rel.n, x)
        _, _, cover = _fbs_from_masks(fam, rel.n)
        covers[x] = dict(cover)
    return Fraction(value), comp, covers


# ---------------------------------------------------------------------------
# Constrained pairs shared by the adversary measures
# ---------------------------------------------------------------------------

def constrained_pairs(obj: BoolObject) -> list:
    """Pairs that every adversary weight scheme must separate.

    Partial functions constrain pairs of domain inputs with different
    values; relations constrain pairs with disjoint valid-output sets.
    Each pair carries the tuple of differing coordinates.
    """
    pairs = []
    if isinstance(obj, PartialFn):
        dom = obj.dom
        for ax, ay in itertools.combinations(dom, 2):
            if obj.table[ax] != obj.table[ay]:
                pairs.append(_pair(ax, ay, obj.n))
    else:
        for ax, ay in itertools.combinations(range(1 << obj.n), 2):
            if not (obj.valid[ax] & obj.valid[ay]):
                pairs.append(_pair(ax, ay, obj.n))
    return pairs


def _pair(x: int, y: int, n: int) -> GeomPair:
    diff = x ^ y
    idx = tuple(i + 1 for i in range(n) if (diff >> i) & 1)
    return GeomPair(x, y, idx)


def scheme_inputs(obj: BoolObject) -> tuple:
    return obj.dom if isinstance(obj, PartialFn) else tuple(range(1 << obj.n))


# ---------------------------------------------------------------------------
# Classical adversary (exact LP with row generation)
# ---------------------------------------------------------------------------

def _cadv_lp(obj: BoolObject, pairs: list) -> LinearProgram:
    n = obj.n
    qvar = lambda x, i: f"q_{x}_{i}"
    cons = []
    active = sorted({x for p in pairs for x in (p.x, p.y)})
    for p in pairs:
        tag = f"{p.x}_{p.y}"
        total = {}
        for i in p.indices:
            t = f"t_{tag}_{i}"
            cons.append(Constraint(f"mx_{tag}_{i}", {t: Fraction(1), qvar(p.x, i): Fraction(-1)},
                                   LE, Fraction(0)))
            cons.append(Constraint(f"my_{tag}_{i}", {t: Fraction(1), qvar(p.y, i): Fraction(-1)},
                                   LE, Fraction(0)))
            total[t] = Fraction(1)
        cons.append(Constraint(f"sep_{tag}", total, GE, Fraction(1)))
    for x in active:
        row = {qvar(x, i): Fraction(1) for i in range(1, n + 1)}
        row["M"] = Fraction(-1)
        cons.append(Constraint(f"row_{x}", row, LE, Fraction(0)))
    return LinearProgram(objective={"M": Fraction(1)}, sense="min",
                         constraints=tuple(cons))


def cadv(obj: BoolObject) -> CadvResult:
    """Classical adversary bound as an exact rational LP optimum.

    The min-constraints are lowered with auxiliary variables t bounded by
    both weights; the min-max objective is lowered through an epigraph
    variable. Constraints are added by row generation: the solve starts
    from the shortest-distance pairs and exact feasibility checks pull in
    any violated pair until none remain.
    """
    n = obj.n
    if n > BS_MAX_N:
        raise ResourceError(f"n={n} exceeds the exact LP cap {BS_MAX_N}")
    all_pairs = constrained_pairs(obj)
    inputs = scheme_inputs(obj)
    if not all_pairs:
        scheme = WeightScheme(kind="cadv", n=n, q={}, inputs=inputs)
        return CadvResult(value=Fraction(0), scheme=scheme)
    by_dist = sorted(all_pairs, key=lambda p: (len(p.indices), p.x, p.y))
    active = [p for p in by_dist if len(p.indices) == len(by_dist[0].indices)]
    rest = [p for p in by_dist if p not in active]
    while True:
        lp = _cadv_lp(obj, active)
        res = solve_lp_exact(lp)
        q = {}
        for x in inputs:
            for i in range(1, n + 1):
                q[(x, i)] = res.witness_primal.get(f"q_{x}_{i}", Fraction(0))
        violated = [p for p in rest
                    if sum(min(q[(p.x, i)], q[(p.y, i)]) for i in p.indices) < 1]
        if not violated:
            scheme = WeightScheme(kind="cadv", n=n, q=q, inputs=inputs)
            return CadvResult(value=res.value, scheme=scheme)
        active.extend(violated)
        rest = [p for p in rest if p not in violated]


def check_cadv_feasible(obj: BoolObject, scheme: WeightScheme):
    """First violated constrained pair of a cadv scheme, or None."""
    for p in constrained_pairs(obj):
        s = sum((min(scheme.q.get((p.x, i), Fraction(0)),
                     scheme.q.get((p.y, i), Fraction(0))) for i in p.indices),
                Fraction(0))
        if s < 1:
            return p
    return None


def cadv_full_lp(obj: BoolObject) -> LinearProgram:
    """The complete classical-adversary LP (all constrained pairs at once),
    for external cross-checking via the interchange-format dump."""
    return _cadv_lp(obj, constrained_pairs(obj))


# ---------------------------------------------------------------------------
# Positive and singleton adversary (certified sandwich)
# ---------------------------------------------------------------------------

def adv(obj: BoolObject, rel_gap: Fraction = Fraction(1, 10_000)) -> CertifiedValue:
    """Positive-weight adversary bound with a certified two-sided sandwich."""
    pairs = constrained_pairs(obj)
    return _geom_with_scheme(obj, pairs, "adv", rel_gap)


def adv1(obj: BoolObject, rel_gap: Fraction = Fraction(1, 10_000)) -> CertifiedValue:
    """Singleton adversary: only Hamming-distance-1 pairs are constrained."""
    pairs = [p for p in constrained_pairs(obj) if len(p.indices) == 1]
    return _geom_with_scheme(obj, pairs, "adv1", rel_gap)


def _geom_with_scheme(obj, pairs, kind, rel_gap):
    inputs = scheme_inputs(obj)
    res = solve_geom_min(inputs, pairs, rel_gap=rel_gap)
    q = dict(res.witness_primal)
    for x in inputs:
        for i in range(1, obj.n + 1):
            q.setdefault((x, i), Fraction(0))
    res.witness_primal = WeightScheme(kind=kind, n=obj.n, q=q, inputs=inputs)
    return res


def check_adv_feasible(obj: BoolObject, scheme: WeightScheme,
                       distance_one_only: bool = False):
    """First violated pair of an adv/adv1 scheme (rigorous), or None."""
    from .optim import check_geom_feasible
    pairs = constrained_pairs(obj)
    if distance_one_only:
        pairs = [p for p in pairs if len(p.indices) == 1]
    return check_geom_feasible(scheme.q, pairs)


# ---------------------------------------------------------------------------
# Degree measures (feasibility LP scan)
# ---------------------------------------------------------------------------

def _degree_lp(f: PartialFn, d: int, eps: Optional[Fraction]) -> LinearProgram:
    n = f.n
    monomials = [m for m in range(1 << n) if popcount(m) <= d]
    names = {m: f"c{m}" for m in monomials}
    cons = []
    for x in range(1 << n):
        row = {names[m]: Fraction(1) for m in monomials if m & ~x == 0}
        lo, hi = Fraction(0), Fraction(1)
        if f.in_dom(x):
            v = Fraction(f.value(x))
            if eps is None:
                cons.append(Constraint(f"fit{x}", row, EQ, v))
                continue
            lo, hi = max(lo, v - eps), min(hi, v + eps)
        cons.append(Constraint(f"lb{x}", row, GE, lo))
        cons.append(Constraint(f"ub{x}", row, LE, hi))
    return LinearProgram(objective={}, sense="min", constraints=tuple(cons),
                         free_vars=frozenset(names.values()))


def _scan_degree(f: PartialFn, eps: Optional[Fraction]) -> DegResult:
    if f.n > BS_MAX_N:
        raise ResourceError(f"n={f.n} exceeds the degree-scan cap {BS_MAX_N}")
    rejections = []
    for d in range(f.n + 1):
        lp = _degree_lp(f, d, eps)
        res = solve_lp_exact(lp)
        if res.status == "optimal":
            coeffs = {}
            for m in range(1 << f.n):
                if popcount(m) <= d:
                    c = res.witness_primal.get(f"c{m}", Fraction(0))
                    if c:
                        coeffs[m] = c
            return DegResult(degree=d, witness=MultiPoly(n=f.n, coeffs=coeffs),
                             rejections=tuple(rejections))
        rejections.append((d, res.witness_dual.get("farkas", {})))
    raise DomainError("degree n is always feasible; this cannot be reached")


def exact_deg(f: PartialFn) -> int:
    """Least degree of a polynomial equal to f on its domain, in [0,1] on the cube."""
    return exact_deg_witness(f).degree


def exact_deg_witness(f: PartialFn) -> DegResult:
    return _scan_degree(f, None)


def approx_deg(f: PartialFn, eps: Union[Fraction, str]) -> int:
    """Least degree of a polynomial within eps of f on its domain, bounded on the cube."""
    return approx_deg_witness(f, eps).degree


def approx_deg_witness(f: PartialFn, eps: Union[Fraction, str]) -> DegResult:
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise InputError("eps must lie strictly between 0 and 1/2")
    return _scan_degree(f, eps)
