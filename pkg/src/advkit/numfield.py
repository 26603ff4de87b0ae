"""Exact arithmetic in real algebraic extensions Q(alpha), alpha = cos(pi/d).

Elements are polynomials in alpha with Fraction coefficients, reduced
modulo the minimal polynomial of alpha (obtained once per d from sympy).
Sign decisions combine an exact zero test (the reduced representation is
zero iff the element is zero) with escalating outward-rounded interval
evaluation, which terminates for every nonzero element.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath
import sympy

from .errors import InternalCheckError

_MAX_PREC_BITS = 4096


@lru_cache(maxsize=None)
def cos_field(d: int) -> "RealAlgebraicField":
    """The field Q(cos(pi/d))."""
    alpha = sympy.cos(sympy.pi / int(d))
    poly = sympy.minimal_polynomial(alpha, sympy.Symbol("x"), polys=True)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in poly.all_coeffs()]
    lead = coeffs[0]
    monic = [c / lead for c in coeffs]
    return RealAlgebraicField(tuple(monic), ("cos(pi/%d)" % d, d))


class RealAlgebraicField:
    """Q(alpha) for a real algebraic alpha with a known minimal polynomial.

    minpoly_desc holds monic coefficients in degree-descending order; the
    generator tag identifies how to evaluate alpha numerically.
    """

    def __init__(self, minpoly_desc: tuple, generator: tuple):
        self.minpoly = minpoly_desc
        self.degree = len(minpoly_desc) - 1
        self.generator = generator
        # alpha^degree = -(lower-order part), used for reduction
        self._top = [-c for c in minpoly_desc[1:]][::-1]  # ascending, length == degree

    def __repr__(self):
        return f"RealAlgebraicField({self.generator[0]})"

    def zero(self) -> "FieldElement":
        return FieldElement(self, (Fraction(0),) * self.degree)

    def one(self) -> "FieldElement":
        return self.from_rational(Fraction(1))

    def from_rational(self, r) -> "FieldElement":
        vec = [Fraction(0)] * self.degree
        vec[0] = Fraction(r)
        return FieldElement(self, tuple(vec))

    def gen(self) -> "FieldElement":
        if self.degree == 1:
            return self.from_rational(self._top[0])
        vec = [Fraction(0)] * self.degree
        vec[1] = Fraction(1)
        return FieldElement(self, tuple(vec))

    def _reduce(self, vec: list) -> tuple:
        """Reduce a coefficient list (ascending powers) modulo the minimal poly."""
        deg = self.degree
        vec = list(vec)
        for k in range(len(vec) - 1, deg - 1, -1):
            c = vec[k]
            if c:
                vec[k] = Fraction(0)
                for j, t in enumerate(self._top):
                    vec[k - deg + j] += c * t
        vec = vec[:deg] + [Fraction(0)] * max(0, deg - len(vec))
        return tuple(vec[:deg])

    def generator_interval(self):
        """Outward-rounded interval for alpha at the current iv precision."""
        tag, d = self.generator
        return mpmath.iv.cos(mpmath.iv.pi / d)


class FieldElement:
    """An element of a RealAlgebraicField, as a reduced coefficient vector."""

    __slots__ = ("field", "vec")

    def __init__(self, field: RealAlgebraicField, vec: tuple):
        self.field = field
        self.vec = vec

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.vec, other.vec)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.vec))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        deg = self.field.degree
        prod = [Fraction(0)] * (2 * deg - 1)
        for i, a in enumerate(self.vec):
            if a:
                for j, b in enumerate(other.vec):
                    if b:
                        prod[i + j] += a * b
        return FieldElement(self.field, self.field._reduce(prod))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise InternalCheckError("mixing different number fields")
            return other
        return self.field.from_rational(Fraction(other))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.vec)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.vec[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise InternalCheckError("element is irrational")
        return self.vec[0]

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.vec == other.vec

    def __hash__(self):
        return hash((id(self.field), self.vec))

    def inverse(self) -> "FieldElement":
        """Inverse via the extended Euclidean algorithm modulo the minimal poly."""
        if self.is_zero():
            raise ZeroDivisionError("zero field element")
        if self.is_rational():
            return self.field.from_rational(1 / self.vec[0])
        # work with ascending-coefficient polynomial lists
        minpoly = list(self.field.minpoly[::-1])  # ascending
        a = list(self.vec)
        r0, r1 = minpoly, a
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while any(c != 0 for c in r1):
            q, r = _polydiv(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _polysub(s0, _polymul(q, s1))
        # r0 is the gcd, a nonzero constant since the minimal poly is irreducible
        const = next(c for c in r0 if c != 0)
        inv_vec = self.field._reduce([c / const for c in s0])
        return FieldElement(self.field, inv_vec)

    def interval(self):
        """Outward-rounded interval at the current mpmath.iv precision."""
        alpha = self.field.generator_interval()
        acc = mpmath.iv.mpf(0)
        for c in reversed(self.vec):
            acc = acc * alpha + (mpmath.iv.mpf(c.numerator) / mpmath.iv.mpf(c.denominator))
        return acc

    def sign(self) -> int:
        """Rigorous sign: exact zero test, then escalating interval refinement."""
        if self.is_zero():
            return 0
        if self.is_rational():
            return 1 if self.vec[0] > 0 else -1
        old = mpmath.iv.prec
        try:
            prec = 64
            while prec <= _MAX_PREC_BITS:
                mpmath.iv.prec = prec
                box = self.interval()
                if box > 0:
                    return 1
                if box < 0:
                    return -1
                prec *= 2
        finally:
            mpmath.iv.prec = old
        raise InternalCheckError("sign of a nonzero field element unresolved")

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - self._coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self._coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - self._coerce(other)).sign() >= 0

    def to_float(self) -> float:
        old = mpmath.mp.prec
        try:
            mpmath.mp.prec = 80
            alpha = mpmath.cos(mpmath.pi / self.field.generator[1])
            acc = mpmath.mpf(0)
            for c in reversed(self.vec):
                acc = acc * alpha + mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
            return float(acc)
        finally:
            mpmath.mp.prec = old

    def __repr__(self):
        terms = []
        g = self.field.generator[0]
        for k, c in enumerate(self.vec):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            elif k == 1:
                terms.append(f"{c}*{g}")
            else:
                terms.append(f"{c}*{g}^{k}")
        return " + ".join(terms) if terms else "0"


def _polydiv(num: list, den: list):
    """Division with remainder for ascending-coefficient Fraction lists."""
    num = list(num)
    dd = _polydeg(den)
    if dd < 0:
        raise ZeroDivisionError("polynomial division by zero")
    inv = 1 / den[dd]
    quot = [Fraction(0)] * max(1, len(num))
    for k in range(_polydeg(num), dd - 1, -1):
        c = num[k] * inv
        if c:
            quot[k - dd] = c
            for j in range(dd + 1):
                num[k - dd + j] -= c * den[j]
    return _polytrim(quot), _polytrim(num[:max(dd, 1)] if dd > 0 else [Fraction(0)])


def _polydeg(p: list) -> int:
    for k in range(len(p) - 1, -1, -1):
        if p[k] != 0:
            return k
    return -1


def _polytrim(p: list) -> list:
    d = _polydeg(p)
    return [Fraction(c) for c in p[:d + 1]] if d >= 0 else [Fraction(0)]


def _polymul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _polytrim(out)


def _polysub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else Fraction(0)) - (b[i] if i < len(b) else Fraction(0))
           for i in range(n)]
    return _polytrim(out)
