#!/usr/bin/env python3
"""Walk through every query-complexity measure on a few named functions.

Each value is exact (rationals printed as p/q); the positive/singleton
adversary values come with certified two-sided sandwiches.
"""

from fractions import Fraction as F

from advkit.boolfn import and_fn, maj_fn, or_fn, pror_fn, xor_fn
from advkit.exactmath import frac_str
from advkit.measures import adv, adv1, approx_deg, bs, cadv, cbs, cfbs, exact_deg, fbs

FUNCTIONS = [
    ("OR_2", or_fn(2)),
    ("AND_2", and_fn(2)),
    ("XOR_2", xor_fn(2)),
    ("MAJ_3", maj_fn(3)),
    ("PrOR_2 (partial)", pror_fn(2)),
]

header = f"{'function':<18}{'bs':>4}{'fbs':>6}{'cbs':>5}{'cfbs':>6}" \
         f"{'CAdv':>6}{'Adv':>16}{'Adv1':>16}{'deg':>5}{'adeg':>6}"
print(header)
print("-" * len(header))
for name, f in FUNCTIONS:
    a = adv(f)
    a1 = adv1(f)
    adv_str = f"[{float(a.lower):.4f},{float(a.upper):.4f}]"
    adv1_str = f"[{float(a1.lower):.4f},{float(a1.upper):.4f}]"
    print(f"{name:<18}{bs(f):>4}{frac_str(fbs(f)):>6}{cbs(f):>5}"
          f"{frac_str(cfbs(f)):>6}{frac_str(cadv(f).value):>6}"
          f"{adv_str:>16}{adv1_str:>16}{exact_deg(f):>5}"
          f"{approx_deg(f, F(1, 3)):>6}")

print()
print("The classical adversary scheme for PrOR_2 (both coordinates of the")
print("all-zeros input are forced to weight 1):")
scheme = cadv(pror_fn(2)).scheme
for (x, i), v in sorted(scheme.q.items()):
    if v:
        print(f"  q(input {x:02b} read right-to-left, coordinate {i}) = {frac_str(v)}")
