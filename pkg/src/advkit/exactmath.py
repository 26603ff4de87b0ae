"""Exact-arithmetic helpers: rational square roots, rigorous sign decisions.

Sign decisions for numbers of the form  rational + sum of c*sqrt(r)  (c, r
nonnegative rationals) are made rigorously: perfect squares are folded into
the rational part exactly, and the remaining surd part, when nonempty, is
irrational, so outward-rounded interval refinement terminates.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .errors import InternalCheckError

_MAX_PREC_BITS = 4096


def sqrt_frac(r: Fraction):
    """Exact square root of a nonnegative rational, or None if irrational."""
    if r < 0:
        raise ValueError("negative radicand")
    if r == 0:
        return Fraction(0)
    pn, pd = r.numerator, r.denominator
    sn, sd = math.isqrt(pn), math.isqrt(pd)
    if sn * sn == pn and sd * sd == pd:
        return Fraction(sn, sd)
    return None


def _iv_frac(r: Fraction):
    return mpmath.iv.mpf(r.numerator) / mpmath.iv.mpf(r.denominator)


def surd_sum_sign(rational: Fraction, surds: Iterable[tuple[Fraction, Fraction]]) -> int:
    """Sign of rational + sum(c * sqrt(rad)) with c >= 0, rad >= 0, decided rigorously.

    Perfect-square radicands are folded into the rational part; equal
    radicands are merged. A nonempty remaining surd part makes the total
    irrational, so escalating interval arithmetic always resolves the sign.
    """
    merged: dict[Fraction, Fraction] = {}
    total = rational
    for c, rad in surds:
        if c < 0:
            raise ValueError("surd coefficients must be nonnegative")
        if c == 0 or rad == 0:
            continue
        s = sqrt_frac(rad)
        if s is not None:
            total += c * s
        else:
            merged[rad] = merged.get(rad, Fraction(0)) + c
    if not merged:
        return (total > 0) - (total < 0)
    old_prec = mpmath.iv.prec
    try:
        prec = 64
        while prec <= _MAX_PREC_BITS:
            mpmath.iv.prec = prec
            acc = _iv_frac(total)
            for rad, c in merged.items():
                acc += _iv_frac(c) * mpmath.iv.sqrt(_iv_frac(rad))
            if acc > 0:
                return 1
            if acc < 0:
                return -1
            prec *= 2
    finally:
        mpmath.iv.prec = old_prec
    raise InternalCheckError("sign of surd sum unresolved at maximum precision")


def surd_sum_ge(rational_threshold: Fraction,
                surds: Sequence[tuple[Fraction, Fraction]]) -> bool:
    """Rigorously decide sum(c * sqrt(rad)) >= threshold."""
    return surd_sum_sign(-Fraction(rational_threshold), surds) >= 0


def ceil_pi_sqrt_half(k: int) -> int:
    """Smallest integer d with d >= pi*sqrt(k)/2, decided rigorously.

    Equivalently the smallest d with 4*d^2/pi^2 >= k; pi*sqrt(k)/2 is
    never an integer for k >= 1, so interval refinement terminates.
    """
    if k < 1:
        raise ValueError("k must be positive")
    old_prec = mpmath.iv.prec
    try:
        prec = 64
        while prec <= _MAX_PREC_BITS:
            mpmath.iv.prec = prec
            val = mpmath.iv.pi * mpmath.iv.sqrt(mpmath.iv.mpf(k)) / 2
            ca = int(mpmath.ceil(mpmath.mpf(val.a)))
            cb = int(mpmath.ceil(mpmath.mpf(val.b)))
            if ca == cb:
                return ca
            prec *= 2
    finally:
        mpmath.iv.prec = old_prec
    raise InternalCheckError("ceil(pi*sqrt(k)/2) unresolved")


def frac_str(x: Fraction) -> str:
    """Render a rational as 'p/q' (or 'p' for integers)."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    """Parse 'p/q', an integer, or a decimal literal into an exact Fraction."""
    return Fraction(s.strip())


def dyadic_ceil(x: float, bits: int = 40) -> Fraction:
    """Smallest dyadic rational with the given denominator >= x."""
    scale = 1 << bits
    return Fraction(math.ceil(x * scale), scale)


def dyadic_round(x: float, bits: int = 30) -> Fraction:
    """Nearest dyadic rational with the given denominator."""
    scale = 1 << bits
    return Fraction(round(x * scale), scale)
