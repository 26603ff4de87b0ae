"""Exact polynomial machinery.

Univariate polynomials carry Fraction coefficients or, where cos(pi/d) is
irrational, coefficients in the real algebraic field Q(cos(pi/d)).
Boundedness of a polynomial over an interval is certified rigorously:
the real roots of the derivative are isolated with exact Sturm sequences,
each critical value is shown to coincide exactly with a bound (gcd test)
or to lie strictly inside the bounds (outward-rounded interval evaluation
on a refined isolating interval), and the endpoints are checked exactly.

Multivariate polynomials are multilinear with monomials keyed by bit masks
(bit i-1 set means variable i occurs).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import mpmath

from .boolfn import PartialFn, Completion, block_mask, mask_block, popcount
from .errors import InputError, InternalCheckError, ResourceError
from .exactmath import ceil_pi_sqrt_half, frac_str
from .numfield import FieldElement, RealAlgebraicField, cos_field

CHEB_CAP = 64
PROR_CAP = 64
COMPOSE_TERM_CAP = 200_000


def _sign_of(c) -> int:
    if isinstance(c, FieldElement):
        return c.sign()
    return (c > 0) - (c < 0)


def _is_zero(c) -> bool:
    if isinstance(c, FieldElement):
        return c.is_zero()
    return c == 0


class UniPoly:
    """Univariate polynomial, coefficients ascending by degree."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs, field: Optional[RealAlgebraicField] = None):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and _is_zero(coeffs[-1]):
            coeffs.pop()
        if not coeffs:
            coeffs = [Fraction(0)]
        self.coeffs = coeffs
        self.field = field

    @classmethod
    def zero(cls, field=None):
        return cls([field.zero() if field else Fraction(0)], field)

    def _coerce(self, c):
        if self.field is not None and not isinstance(c, FieldElement):
            return self.field.from_rational(Fraction(c))
        return c

    def degree(self) -> int:
        if len(self.coeffs) == 1 and _is_zero(self.coeffs[0]):
            return -1
        return len(self.coeffs) - 1

    def __call__(self, t):
        t = self._coerce(t)
        acc = self._coerce(Fraction(0))
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def derivative(self) -> "UniPoly":
        if len(self.coeffs) == 1:
            return UniPoly.zero(self.field)
        return UniPoly([self.coeffs[k] * k for k in range(1, len(self.coeffs))], self.field)

    def __add__(self, other):
        other = self._as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        zero = self._coerce(Fraction(0))
        a = self.coeffs + [zero] * (n - len(self.coeffs))
        b = other.coeffs + [zero] * (n - len(other.coeffs))
        return UniPoly([x + y for x, y in zip(a, b)], self.field)

    def __sub__(self, other):
        other = self._as_poly(other)
        return self + UniPoly([-c for c in other.coeffs], self.field)

    def __mul__(self, other):
        other = self._as_poly(other)
        zero = self._coerce(Fraction(0))
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not _is_zero(a):
                for j, b in enumerate(other.coeffs):
                    if not _is_zero(b):
                        out[i + j] = out[i + j] + a * b
        return UniPoly(out, self.field)

    def scale(self, c) -> "UniPoly":
        c = self._coerce(c)
        return UniPoly([a * c for a in self.coeffs], self.field)

    def _as_poly(self, other) -> "UniPoly":
        if isinstance(other, UniPoly):
            return other
        return UniPoly([self._coerce(other)], self.field)

    def divmod(self, other: "UniPoly"):
        """Exact division with remainder over the coefficient field."""
        den = other.coeffs
        dd = other.degree()
        if dd < 0:
            raise ZeroDivisionError("division by the zero polynomial")
        num = list(self.coeffs)
        zero = self._coerce(Fraction(0))
        quot = [zero] * max(1, len(num))
        lead_inv = _invert(den[dd])
        for k in range(len(num) - 1, dd - 1, -1):
            c = num[k] * lead_inv
            if not _is_zero(c):
                quot[k - dd] = c
                for j in range(dd + 1):
                    num[k - dd + j] = num[k - dd + j] - c * den[j]
        rem = num[:dd] if dd > 0 else [zero]
        return UniPoly(quot, self.field), UniPoly(rem, self.field)

    def monic(self) -> "UniPoly":
        d = self.degree()
        if d < 0:
            return self
        return self.scale(_invert(self.coeffs[d]))

    def divide_linear(self, a) -> "UniPoly":
        """Exact synthetic division by (t - a); the remainder must vanish."""
        a = self._coerce(a)
        out = []
        acc = self._coerce(Fraction(0))
        for c in reversed(self.coeffs):
            acc = acc * a + c
            out.append(acc)
        rem = out.pop()
        if not _is_zero(rem):
            raise InternalCheckError("linear division left a remainder")
        return UniPoly(list(reversed(out)), self.field)

    def interval_eval(self, lo: Fraction, hi: Fraction):
        """Outward-rounded enclosure of the image of [lo, hi]."""
        lo_iv = mpmath.iv.mpf(lo.numerator) / mpmath.iv.mpf(lo.denominator)
        hi_iv = mpmath.iv.mpf(hi.numerator) / mpmath.iv.mpf(hi.denominator)
        t = mpmath.iv.mpf([lo_iv.a, hi_iv.b])
        acc = mpmath.iv.mpf(0)
        for c in reversed(self.coeffs):
            ci = c.interval() if isinstance(c, FieldElement) else \
                mpmath.iv.mpf(c.numerator) / mpmath.iv.mpf(c.denominator)
            acc = acc * t + ci
        return acc

    def to_strings(self) -> list:
        return [repr(c) if isinstance(c, FieldElement) else frac_str(c)
                for c in self.coeffs]

    def __repr__(self):
        return "UniPoly([" + ", ".join(self.to_strings()) + "])"


def _invert(c):
    if isinstance(c, FieldElement):
        return c.inverse()
    return Fraction(1) / c


def chebyshev(d: int) -> UniPoly:
    """Chebyshev polynomial of the first kind, exact integer coefficients."""
    if not 0 <= d <= CHEB_CAP:
        raise InputError(f"degree must be in [0, {CHEB_CAP}]")
    t0 = UniPoly([Fraction(1)])
    if d == 0:
        return t0
    t1 = UniPoly([Fraction(0), Fraction(1)])
    for _ in range(d - 1):
        t0, t1 = t1, t1.scale(2) * UniPoly([Fraction(0), Fraction(1)]) - t0
    return t1


# ---------------------------------------------------------------------------
# Rigorous boundedness certification
# ---------------------------------------------------------------------------

def _squarefree(p: UniPoly) -> UniPoly:
    g = _poly_gcd(p, p.derivative())
    if g.degree() <= 0:
        return p
    q, _ = p.divmod(g)
    return q


def _poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    while b.degree() >= 0 and not all(_is_zero(c) for c in b.coeffs):
        _, r = a.divmod(b)
        a, b = b, r
    return a.monic() if a.degree() > 0 else a


def _sturm_chain(p: UniPoly) -> list:
    chain = [p, p.derivative()]
    while chain[-1].degree() > 0:
        _, r = chain[-2].divmod(chain[-1])
        if all(_is_zero(c) for c in r.coeffs):
            break
        chain.append(UniPoly([-c for c in r.coeffs], p.field))
    return chain


def _variations(chain, t: Fraction) -> int:
    signs = []
    for q in chain:
        s = _sign_of(q(t))
        if s != 0:
            signs.append(s)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_roots(chain, a: Fraction, b: Fraction) -> int:
    """Distinct real roots in (a, b] for a squarefree chain head."""
    return _variations(chain, a) - _variations(chain, b)


def isolate_roots(p: UniPoly, a: Fraction, b: Fraction) -> list:
    """Isolating intervals (lo, hi] for the distinct roots of p in (a, b].

    p must not vanish at a. Roots hit exactly by a bisection midpoint are
    returned as degenerate [t, t] intervals.
    """
    p = _squarefree(p)
    chain = _sturm_chain(p)
    out: list = []
    exact: list = []
    _isolate_into(p, chain, a, b, _count_roots(chain, a, b), out, exact)
    return [(t, t) for t in exact] + out


def _isolate_into(p, chain, lo, hi, count, out, exact):
    if count == 0:
        return
    if count == 1:
        out.append((lo, hi))
        return
    mid = (lo + hi) / 2
    if _is_zero(p(mid)):
        exact.append(mid)
        q = p.divide_linear(mid)
        sub = _sturm_chain(q)
        _isolate_into(q, sub, lo, mid, _count_roots(sub, lo, mid), out, exact)
        _isolate_into(q, sub, mid, hi, _count_roots(sub, mid, hi), out, exact)
        return
    cl = _count_roots(chain, lo, mid)
    _isolate_into(p, chain, lo, mid, cl, out, exact)
    _isolate_into(p, chain, mid, hi, count - cl, out, exact)


def _refine_to_width(p: UniPoly, chain, lo: Fraction, hi: Fraction, width: Fraction):
    while hi - lo > width:
        mid = (lo + hi) / 2
        if _is_zero(p(mid)):
            return mid, mid
        if _count_roots(chain, lo, mid) == 1:
            hi = mid
        else:
            lo = mid
    return lo, hi


def certify_bounded(p: UniPoly, a: Fraction, b: Fraction,
                    lo_bound: Fraction, hi_bound: Fraction) -> None:
    """Certify lo_bound <= p(t) <= hi_bound for every t in [a, b].

    Raises InternalCheckError if certification fails. Endpoints are checked
    exactly; interior critical values are classified by exact gcd tests
    against the bounds, with interval refinement for values strictly inside.
    """
    a, b = Fraction(a), Fraction(b)
    for t in (a, b):
        v = p(t)
        if _sign_of(v - p._coerce(lo_bound)) < 0 or _sign_of(p._coerce(hi_bound) - v) < 0:
            raise InternalCheckError(f"endpoint value at t={t} violates the bounds")
    dp = p.derivative()
    if dp.degree() <= 0 and (dp.degree() < 0 or _is_zero(dp.coeffs[0])):
        return
    dps = _squarefree(dp)
    # roots exactly at the endpoints are covered by the endpoint checks
    for t in (a, b):
        while _is_zero(dps(t)):
            dps = dps.divide_linear(t)
    if dps.degree() <= 0:
        return
    p_lo = p - UniPoly([p._coerce(lo_bound)], p.field)
    p_hi = p - UniPoly([p._coerce(hi_bound)], p.field)
    g_lo = _poly_gcd(dps, p_lo)
    g_hi = _poly_gcd(dps, p_hi)
    chain_lo = _sturm_chain(g_lo) if g_lo.degree() > 0 else None
    chain_hi = _sturm_chain(g_hi) if g_hi.degree() > 0 else None
    chain = _sturm_chain(dps)
    for (ilo, ihi) in isolate_roots(dps, a, b):
        if ilo == ihi:
            v = p(ilo)
            if _sign_of(v - p._coerce(lo_bound)) < 0 or _sign_of(p._coerce(hi_bound) - v) < 0:
                raise InternalCheckError(f"critical value at t={ilo} violates the bounds")
            continue
        if chain_lo is not None and _count_roots(chain_lo, ilo, ihi) > 0:
            continue  # critical value equals lo_bound exactly
        if chain_hi is not None and _count_roots(chain_hi, ilo, ihi) > 0:
            continue  # critical value equals hi_bound exactly
        rl, rh = ilo, ihi
        ok = False
        width = (ihi - ilo) / (1 << 12)
        old_prec = mpmath.iv.prec
        try:
            for prec in (128, 256, 512, 1024):
                mpmath.iv.prec = prec
                rl, rh = _refine_to_width(dps, chain, rl, rh, width)
                width /= Fraction(1 << 16)
                if rl == rh:
                    v = p(rl)
                    if _sign_of(v - p._coerce(lo_bound)) >= 0 and \
                       _sign_of(p._coerce(hi_bound) - v) >= 0:
                        ok = True
                    break
                box = p.interval_eval(rl, rh)
                lo_iv = mpmath.iv.mpf(lo_bound.numerator) / mpmath.iv.mpf(lo_bound.denominator)
                hi_iv = mpmath.iv.mpf(hi_bound.numerator) / mpmath.iv.mpf(hi_bound.denominator)
                if box > lo_iv and box < hi_iv:
                    ok = True
                    break
        finally:
            mpmath.iv.prec = old_prec
        if not ok:
            raise InternalCheckError(
                f"could not certify the critical value in ({ilo}, {ihi})")


# ---------------------------------------------------------------------------
# The promise-OR polynomial construction
# ---------------------------------------------------------------------------

class PrOrPoly(NamedTuple):
    r: UniPoly
    d: int


def pror_poly(k: int) -> PrOrPoly:
    """Exact polynomial for promise-OR on k bits through the Hamming weight.

    Returns (r, d) with d the least degree satisfying 4d^2/pi^2 >= k and
    r(t) = (1 - T_d(1 - (1 - cos(pi/d)) t)) / 2. The construction is
    verified before returning: r(0) = 0 and r(1) = 1 exactly, and
    0 <= r <= 1 on [0, k] by rigorous certification.
    """
    if not 1 <= k <= PROR_CAP:
        raise InputError(f"k must be in [1, {PROR_CAP}]")
    d = ceil_pi_sqrt_half(k)
    field = cos_field(d)
    c = field.gen()
    td = chebyshev(d)
    if not (td(c) - field.from_rational(-1)).is_zero():
        raise InternalCheckError("Chebyshev value at cos(pi/d) is not -1")
    one = field.one()
    u = UniPoly([one, c - one], field)           # u(t) = 1 - (1 - c) t
    tdu = _compose_cheb(td, u, field)
    r = (UniPoly([one], field) - tdu).scale(field.from_rational(Fraction(1, 2)))
    if not r(field.from_rational(0)).is_zero():
        raise InternalCheckError("r(0) != 0")
    if not (r(field.from_rational(1)) - one).is_zero():
        raise InternalCheckError("r(1) != 1")
    certify_bounded(r, Fraction(0), Fraction(k), Fraction(0), Fraction(1))
    return PrOrPoly(r=r, d=d)


def _compose_cheb(td: UniPoly, u: UniPoly, field) -> UniPoly:
    """T_d(u(t)) by Horner over UniPoly arithmetic."""
    acc = UniPoly([field.zero()], field)
    for coef in reversed(td.coeffs):
        acc = acc * u + UniPoly([field.from_rational(coef)], field)
    return acc


# ---------------------------------------------------------------------------
# Multilinear polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiPoly:
    """Multilinear polynomial over n variables; monomials keyed by bit mask."""

    n: int
    coeffs: dict  # mask -> Fraction | FieldElement

    def degree(self) -> int:
        live = [m for m, c in self.coeffs.items() if not _is_zero(c)]
        return max((popcount(m) for m in live), default=0)

    def evaluate(self, x: int):
        """Exact value at a cube point given by its bit mask."""
        total = Fraction(0)
        for mask, c in self.coeffs.items():
            if mask & ~x == 0:
                total = c + total
        return total

    def affine(self, scale, shift) -> "MultiPoly":
        out = {m: c * scale for m, c in self.coeffs.items() if not _is_zero(c * scale)}
        const = out.get(0, Fraction(0)) + shift
        if _is_zero(const):
            out.pop(0, None)
        else:
            out[0] = const
        return MultiPoly(n=self.n, coeffs=out)

    def to_json_dict(self) -> dict:
        monos = []
        for mask in sorted(self.coeffs):
            c = self.coeffs[mask]
            if _is_zero(c):
                continue
            monos.append({"vars": sorted(mask_block(mask)),
                          "coeff": frac_str(c) if isinstance(c, Fraction) else repr(c)})
        return {"n": self.n, "monomials": monos}


def multilinear_extension(f: PartialFn, completion_values=None) -> MultiPoly:
    """Exact multilinear extension of a total table (Moebius transform)."""
    n = f.n
    values = completion_values if completion_values is not None else \
        [Fraction(f.value(x)) for x in range(1 << n)]
    coeffs = {}
    for mask in range(1 << n):
        acc = Fraction(0)
        sub = mask
        while True:
            sign = -1 if (popcount(mask ^ sub) % 2) else 1
            acc += sign * Fraction(values[sub])
            if sub == 0:
                break
            sub = (sub - 1) & mask
        if acc:
            coeffs[mask] = acc
    return MultiPoly(n=n, coeffs=coeffs)


def compose_with_pror(p: MultiPoly, k: int,
                      term_cap: int = COMPOSE_TERM_CAP) -> MultiPoly:
    """Substitute an independent promise-OR polynomial block for each variable.

    Variable j of p becomes r(sum of bits (j-1)k+1 .. jk); the result is the
    exact multilinear polynomial on kn variables (blocks are disjoint, so no
    cross-block reduction ever arises).
    """
    rr, d = pror_poly(k)
    if p.degree() * d > 64:
        raise ResourceError("composed degree exceeds the expansion cap")
    field = rr.field
    rvals = [rr(field.from_rational(s)) for s in range(k + 1)]
    # coefficient of a size-m subset in the symmetric multilinear representation
    a = []
    for m in range(k + 1):
        acc = field.zero()
        for s in range(m + 1):
            term = rvals[s] * (math.comb(m, s) * (-1) ** (m - s))
            acc = acc + term
        a.append(acc)
    if not a[0].is_zero():
        raise InternalCheckError("the block polynomial must vanish at weight 0")
    all_rational = all(v.is_rational() for v in a)
    block_terms = []
    for mask in range(1, 1 << k):
        coeff = a[popcount(mask)]
        if not coeff.is_zero():
            block_terms.append((mask, coeff.as_rational() if all_rational else coeff))

    out: dict = {}
    for pmask, pc in p.coeffs.items():
        if _is_zero(pc):
            continue
        blocks = [j for j in range(p.n) if (pmask >> j) & 1]
        pools = [block_terms] * len(blocks)
        for combo in itertools.product(*pools):
            new_mask = 0
            coeff = pc
            for j, (bmask, bc) in zip(blocks, combo):
                new_mask |= bmask << (j * k)
                coeff = coeff * bc
            if _is_zero(coeff):
                continue
            cur = out.get(new_mask)
            out[new_mask] = coeff if cur is None else cur + coeff
            if len(out) > term_cap:
                raise ResourceError("composition exceeded the term cap")
        if not blocks:
            cur = out.get(0)
            out[0] = pc if cur is None else cur + pc
    out = {m: c for m, c in out.items() if not _is_zero(c)}
    return MultiPoly(n=p.n * k, coeffs=out)


def completion_from_poly(p: MultiPoly, f: PartialFn) -> Completion:
    """Round a bounded approximating polynomial to a total function.

    Requires p in [0,1] everywhere on the cube and within error < 1/2 of f
    on its domain; the completion takes value 1 exactly where p >= 1/2.
    """
    n = f.n
    if p.n != n:
        raise InputError("arity mismatch between the polynomial and the function")
    half = Fraction(1, 2)
    total = []
    for x in range(1 << n):
        v = p.evaluate(x)
        if v < 0 or v > 1:
            raise InputError(f"polynomial leaves [0,1] at input {x:0{n}b}")
        if f.in_dom(x) and abs(v - f.value(x)) >= half:
            raise InputError(f"approximation error >= 1/2 at domain input {x}")
        total.append(1 if v >= half else 0)
    return Completion(base=f, total=tuple(total))


def rescale_poly(p: MultiPoly, eps: Fraction) -> MultiPoly:
    """Affine rescaling (2p + 1 - 2*eps) / (3 - 2*eps), degree-preserving."""
    eps = Fraction(eps)
    for x in range(1 << p.n):
        v = p.evaluate(x)
        if v < 0 or v > 1:
            raise InputError("polynomial must be bounded in [0,1] on the cube")
    den = 3 - 2 * eps
    return p.affine(Fraction(2) / den, (1 - 2 * eps) / den)


def blowup_blocks(f: PartialFn, x: int, w: dict, k: int) -> list:
    """Disjoint sensitive blocks of the all-zeros input after promise-OR
    block substitution, one bundle of k*w_B blocks per weighted block B.

    w maps sensitive blocks of x (with respect to f) to nonnegative weights
    with per-coordinate load at most 1; k must be a multiple of the least
    common denominator of the weights. Each output block flips exactly one
    fresh bit inside the promise-OR copy of every coordinate it touches, so
    sensitivity and pairwise disjointness hold by construction and are
    re-verified here.
    """
    n = f.n
    if not f.in_dom(x):
        raise InputError("x must lie in the domain of f")
    denoms = [Fraction(v).denominator for v in w.values()]
    ell = math.lcm(*denoms) if denoms else 1
    if k % ell != 0:
        raise InputError(f"k must be a multiple of the weight denominator lcm L={ell}")
    loads = [Fraction(0)] * (n + 1)
    for block, weight in w.items():
        weight = Fraction(weight)
        if weight < 0:
            raise InputError("weights must be nonnegative")
        y = x ^ block_mask(block, n)
        if not f.in_dom(y) or f.value(y) == f.value(x):
            raise InputError(f"block {sorted(block)} is not sensitive at x")
        for i in block:
            loads[i] += weight
    if any(load > 1 for load in loads):
        raise InputError("per-coordinate load exceeds 1")

    next_free = [0] * (n + 1)   # bits already consumed inside each copy
    out = []
    for block in sorted(w, key=lambda b: block_mask(b, n)):
        copies = int(k * Fraction(w[block]))
        for _ in range(copies):
            big = set()
            for i in block:
                bit = next_free[i]
                next_free[i] += 1
                if bit >= k:
                    raise InternalCheckError("ran out of bits inside a copy")
                big.add((i - 1) * k + bit + 1)
            out.append(frozenset(big))

    # re-verify: disjoint, and each block sensitive for the all-zeros input
    seen = 0
    for big in out:
        m = block_mask(big, n * k)
        if m & seen:
            raise InternalCheckError("constructed blocks are not disjoint")
        seen |= m
        if _composed_value(f, x, n, k, 0) == _composed_value(f, x, n, k, m):
            raise InternalCheckError("constructed block is not sensitive")
    return out


def _composed_value(f: PartialFn, x: int, n: int, k: int, assignment: int):
    """Value of the promise-OR composition at a kn-bit assignment, relative
    to base input x (copy j computes the j-th bit flip indicator)."""
    inner = 0
    for j in range(n):
        bits = (assignment >> (j * k)) & ((1 << k) - 1)
        weight = popcount(bits)
        if weight > 1:
            raise InputError("assignment violates the promise")
        if weight == 1:
            inner |= 1 << j
    return f.value(x ^ inner)
