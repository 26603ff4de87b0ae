#!/usr/bin/env python3
"""Exact expected-cost analysis of the repeat-until-majority strategy for
evaluating OR over noisy gadget computations. All numbers come from an
absorbing-walk computation in exact rational arithmetic; nothing is
sampled."""

import math
from fractions import Fraction as F

from advkit.liftsim import noisy_or_schedule

delta = F(1, 4)
print(f"per-run error delta = {delta}\n")

print("all-zeros inputs: every gadget must be inspected, at constant")
print("expected repetitions each")
print(f"{'n':>4} {'cap':>4} {'E[0-invocations]':>18} {'E0/n':>8}")
for n in (4, 16, 64):
    st = noisy_or_schedule(n, 0, delta)
    print(f"{n:>4} {st.cap:>4} {float(st.expected_zero_invocations):>18.4f} "
          f"{float(st.expected_zero_invocations/n):>8.4f}")

print()
print("a single leading 1: the run halts there, so 1-gadget work stays")
print("logarithmic and later gadgets are rarely touched")
print(f"{'n':>4} {'cap':>4} {'E[1-invocations]':>18} {'E1/log2(n)':>11} "
      f"{'detect':>8}")
for n in (4, 16, 64):
    st = noisy_or_schedule(n, 1, delta)
    print(f"{n:>4} {st.cap:>4} {float(st.expected_one_invocations):>18.4f} "
          f"{float(st.expected_one_invocations)/math.log2(n):>11.4f} "
          f"{float(st.detect_probability):>8.4f}")

print()
print("noiseless oracle (delta = 0): each leading 0-gadget is invoked")
print("exactly once and the first 1-gadget is detected with certainty")
st = noisy_or_schedule(6, 0b000100, F(0))
print(f"  n=6, third bit set: E0 = {st.expected_zero_invocations}, "
      f"detect = {st.detect_probability}")
