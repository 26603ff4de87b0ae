#!/usr/bin/env python3
"""The Chebyshev-based promise-OR polynomial and the sensitive-block
blow-up it powers, with every bound certified by exact root isolation."""

from fractions import Fraction as F

from advkit.boolfn import or_fn, total_fn
from advkit.measures import fbs_at
from advkit.poly import blowup_blocks, chebyshev, pror_poly

print("Chebyshev polynomials (ascending coefficients):")
for d in (0, 1, 2, 4):
    print(f"  T_{d}: {chebyshev(d).coeffs}")

print()
print("promise-OR polynomials r with r(0)=0, r(1)=1 and certified")
print("0 <= r <= 1 on [0, k]:")
for k in (1, 2, 4, 9, 16, 64):
    r, d = pror_poly(k)
    print(f"  k={k:>2}: degree d={d:>2}, coefficient field "
          f"{'rational' if r.field.degree == 1 else f'Q(cos(pi/{d}))'}")

print()
print("blow-up: one fresh bit per copy turns a fractional packing into an")
print("integral family of disjoint sensitive blocks")
f = or_fn(2)
res = fbs_at(f, 0)
blocks = blowup_blocks(f, 0, res.packing, 2)
print(f"  2-bit OR at 00, k=2: fbs = {res.value}, blocks = "
      f"{[sorted(b) for b in blocks]}")

g = total_fn(3, (0, 0, 0, 1, 0, 1, 1, 0))
res = fbs_at(g, 0)
print(f"  triangle instance at 000: fbs = {res.value} "
      f"(weights {[str(w) for w in res.packing.values()]})")
blocks = blowup_blocks(g, 0, res.packing, 2)
print(f"  k=2 yields {len(blocks)} = 2 * {res.value} disjoint sensitive blocks")
