"""Constructive transformations between adversary weight schemes and
fractional-cover witnesses, each re-verified after construction.

Every routine follows the same pattern: build the object the corresponding
existence proof describes, then check its claimed feasibility and objective
bound by direct evaluation, refusing to return anything unverified.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .boolfn import (BoolObject, Completion, PartialFn, input_str, mask_block,
                     sensitive_blocks_total)
from .errors import InputError
from .exactmath import dyadic_round, frac_str
from .measures import (WeightScheme, check_adv_feasible, check_cadv_feasible,
                       constrained_pairs, scheme_inputs)


@dataclass(frozen=True)
class Violation:
    x: int
    y: Optional[int]
    slack: Fraction

    def describe(self, n: int) -> str:
        where = input_str(self.x, n) if self.y is None else \
            f"({input_str(self.x, n)}, {input_str(self.y, n)})"
        return f"constraint at {where} short by {frac_str(self.slack)}"


def check_feasible(obj: BoolObject, scheme: WeightScheme):
    """Evaluate every constrained pair of a weight scheme.

    Returns None when feasible; otherwise a Violation naming the first
    violated pair and its slack. The adv constraints are decided with
    rigorous outward-rounded arithmetic, so a None answer is exact.
    """
    if scheme.kind == "cadv":
        p = check_cadv_feasible(obj, scheme)
        if p is None:
            return None
        got = sum((min(scheme.q.get((p.x, i), Fraction(0)),
                       scheme.q.get((p.y, i), Fraction(0))) for i in p.indices),
                  Fraction(0))
        return Violation(x=p.x, y=p.y, slack=1 - got)
    p = check_adv_feasible(obj, scheme, distance_one_only=scheme.kind == "adv1")
    if p is None:
        return None
    import math
    got = sum(math.sqrt(float(scheme.q.get((p.x, i), 0)) *
                        float(scheme.q.get((p.y, i), 0))) for i in p.indices)
    # reported slack is approximate for surd sums; the ok/violation decision
    # itself is rigorous
    return Violation(x=p.x, y=p.y, slack=Fraction(1) - dyadic_round(got, 40))


def _cover_ok(cover: dict, blocks: list) -> Optional[frozenset]:
    """First sensitive block not covered to weight 1, or None."""
    for mask in blocks:
        total = sum((Fraction(cover.get(i, 0)) for i in mask_block(mask)), Fraction(0))
        if total < 1:
            return mask_block(mask)
    return None


def cadv_to_cfbs_witness(f: PartialFn, scheme: WeightScheme):
    """Completion plus per-input covers built from a feasible cadv scheme.

    Each input outside the domain is assigned the value of the domain input
    minimizing the scheme weight over their differing coordinates (ties to
    the lexicographically smallest); doubling the scheme row then covers
    every sensitive block of every domain input with respect to that
    completion. Feasibility of the input scheme and of every produced
    cover is verified; the per-input cover objective is at most twice the
    scheme row sum.
    """
    bad = check_feasible(f, scheme)
    if bad is not None:
        raise InputError(f"scheme infeasible: {bad.describe(f.n)}")
    n = f.n
    dom = f.dom
    total = []
    for z in range(1 << n):
        if f.in_dom(z):
            total.append(f.value(z))
            continue
        best_cost, best_z = None, None
        for zp in dom:
            cost = sum((scheme.q.get((zp, i), Fraction(0))
                        for i in range(1, n + 1) if (z ^ zp) >> (i - 1) & 1),
                       Fraction(0))
            if best_cost is None or cost < best_cost:
                best_cost, best_z = cost, zp
        total.append(f.value(best_z))
    completion = Completion(base=f, total=tuple(total))
    covers = {}
    for x in dom:
        cover = {i: 2 * scheme.q.get((x, i), Fraction(0)) for i in range(1, n + 1)}
        blocks = sensitive_blocks_total(tuple(total), n, x)
        uncovered = _cover_ok(cover, blocks)
        if uncovered is not None:
            raise InputError(
                f"constructed cover misses block {sorted(uncovered)} at "
                f"{input_str(x, n)}")
        covers[x] = cover
    return completion, covers


def cfbs_to_cadv_scheme(f: PartialFn, completion: Completion, covers: dict):
    """Weight schemes for the classical adversary from per-input covers.

    Builds both the doubled scheme q(x,i) = 2 q_x(i) and the undoubled
    variant q(x,i) = q_x(i), checks each for feasibility, and returns a
    dict labelling which of the two passed. Each input cover must itself be
    feasible for the fractional-cover program at its input with respect to
    the completion.
    """
    n = f.n
    for x in f.dom:
        blocks = sensitive_blocks_total(completion.total, n, x)
        uncovered = _cover_ok(covers[x], blocks)
        if uncovered is not None:
            raise InputError(
                f"cover at {input_str(x, n)} misses block {sorted(uncovered)}")
    out = {}
    for label, factor in (("factor2", 2), ("factor1", 1)):
        q = {}
        for x in f.dom:
            for i in range(1, n + 1):
                q[(x, i)] = factor * Fraction(covers[x].get(i, 0))
        scheme = WeightScheme(kind="cadv", n=n, q=q, inputs=scheme_inputs(f))
        out[label] = {"scheme": scheme, "feasible": check_feasible(f, scheme) is None,
                      "objective": scheme.objective()}
    return out


def adv_to_cadv_scheme(f: BoolObject, scheme: WeightScheme, bound: Fraction):
    """Classical-adversary scheme from a positive-adversary scheme.

    Scaling a feasible geometric-mean scheme by twice any upper bound on
    its objective yields a feasible min-constraint scheme with objective at
    most twice the bound squared. The input scheme, the bound, and the
    output feasibility are all verified.
    """
    bound = Fraction(bound)
    bad = check_feasible(f, scheme)
    if bad is not None:
        raise InputError(f"input scheme infeasible: {bad.describe(f.n)}")
    if scheme.objective() > bound:
        raise InputError("bound is smaller than the scheme objective")
    factor = 2 * bound
    q = {k: factor * v for k, v in scheme.q.items()}
    out = WeightScheme(kind="cadv", n=f.n, q=q, inputs=scheme.inputs)
    bad = check_feasible(f, out)
    if bad is not None:
        raise InputError(f"scaled scheme failed verification: {bad.describe(f.n)}")
    return out


def witness_bundle_json(f: PartialFn, completion: Completion, covers: dict) -> dict:
    """Serialize a completion-plus-covers witness for verification reports."""
    return {
        "completion": [int(v) for v in completion.total],
        "covers": {input_str(x, f.n): {str(i): frac_str(Fraction(w))
                                       for i, w in sorted(cover.items()) if w}
                   for x, cover in sorted(covers.items())},
    }
