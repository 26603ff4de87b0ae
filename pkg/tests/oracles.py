"""Independent oracles used to freeze expected values.

Everything here recomputes quantities from first principles with different
algorithms than the package uses: exhaustive packings over all sensitive
blocks, vertex enumeration for the fractional packing polytope, dense grid
search for the geometric-mean programs, and scipy feasibility solves for
the degree programs. Oracles never import the code paths they check.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from advkit.boolfn import PartialFn


def all_sensitive_masks(f: PartialFn, x: int) -> list:
    fx = f.table[x]
    out = []
    for mask in range(1, 1 << f.n):
        y = x ^ mask
        if f.table[y] is not None and f.table[y] != fx:
            out.append(mask)
    return out


def packing_oracle(f: PartialFn, x: int) -> int:
    """Max disjoint family over ALL sensitive blocks by exhaustive recursion."""
    masks = all_sensitive_masks(f, x)

    def rec(idx, used):
        if idx == len(masks):
            return 0
        best = rec(idx + 1, used)
        if not masks[idx] & used:
            best = max(best, 1 + rec(idx + 1, used | masks[idx]))
        return best

    return rec(0, 0)


def bs_oracle(f: PartialFn) -> int:
    return max(packing_oracle(f, x) for x in f.dom)


def _solve_square(rows, rhs):
    """Fraction Gaussian elimination; returns None for singular systems."""
    n = len(rows)
    a = [list(map(Fraction, row)) + [Fraction(rhs[i])] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def fbs_vertex_oracle(f: PartialFn, x: int) -> Fraction:
    """Max total weight over the packing polytope by vertex enumeration.

    Constraints: per-coordinate load <= 1 and weight >= 0, over ALL
    sensitive blocks. Every vertex is the solution of m active constraints.
    """
    masks = all_sensitive_masks(f, x)
    m = len(masks)
    if m == 0:
        return Fraction(0)
    n = f.n
    # constraint rows: loads (coefficients 1 on blocks containing i), rhs 1
    #                  nonnegativity rows e_j, rhs 0
    rows = []
    for i in range(n):
        rows.append(([1 if (mask >> i) & 1 else 0 for mask in masks], 1))
    for j in range(m):
        rows.append(([1 if jj == j else 0 for jj in range(m)], 0))
    best = Fraction(0)
    for active in itertools.combinations(range(len(rows)), m):
        sol = _solve_square([rows[i][0] for i in active],
                            [rows[i][1] for i in active])
        if sol is None or any(w < 0 for w in sol):
            continue
        ok = True
        for i in range(n):
            load = sum(w for w, mask in zip(sol, masks) if (mask >> i) & 1)
            if load > 1:
                ok = False
                break
        if ok:
            best = max(best, sum(sol, Fraction(0)))
    return best


def cbs_oracle(f: PartialFn) -> int:
    """Direct definition: enumerate completions, max over domain inputs."""
    free = [x for x in range(1 << f.n) if f.table[x] is None]
    best = None
    for bits in itertools.product((0, 1), repeat=len(free)):
        table = list(f.table)
        for x, b in zip(free, bits):
            table[x] = b
        g = PartialFn(n=f.n, table=tuple(table))
        cur = max(packing_oracle(g, x) for x in f.dom)
        best = cur if best is None else min(best, cur)
    return best


def cfbs_oracle(f: PartialFn) -> Fraction:
    free = [x for x in range(1 << f.n) if f.table[x] is None]
    best = None
    for bits in itertools.product((0, 1), repeat=len(free)):
        table = list(f.table)
        for x, b in zip(free, bits):
            table[x] = b
        g = PartialFn(n=f.n, table=tuple(table))
        cur = max(fbs_vertex_oracle(g, x) for x in f.dom)
        best = cur if best is None else min(best, cur)
    return best


def pror2_adv_grid_oracle(refine_steps: int = 4) -> float:
    """Dense grid search for the promise-OR positive-adversary program.

    Weights not appearing in any constraint are zero at an optimum, and
    each single-term constraint sqrt(a b) >= 1 is tight, which reduces the
    program to minimizing max(u + v, 1/u, 1/v) over positive u, v.
    """
    lo_u, hi_u, lo_v, hi_v = 0.05, 3.0, 0.05, 3.0
    best, arg = None, None
    for _ in range(refine_steps):
        us = np.linspace(lo_u, hi_u, 321)
        vs = np.linspace(lo_v, hi_v, 321)
        uu, vv = np.meshgrid(us, vs)
        obj = np.maximum(uu + vv, np.maximum(1.0 / uu, 1.0 / vv))
        idx = np.unravel_index(np.argmin(obj), obj.shape)
        best, arg = float(obj[idx]), (float(uu[idx]), float(vv[idx]))
        du = (hi_u - lo_u) / 320 * 4
        dv = (hi_v - lo_v) / 320 * 4
        lo_u, hi_u = max(arg[0] - du, 1e-3), arg[0] + du
        lo_v, hi_v = max(arg[1] - dv, 1e-3), arg[1] + dv
    return best


def scipy_degree_feasible(f: PartialFn, d: int, eps: Fraction) -> bool:
    """Independent feasibility check of the bounded-approximation program
    at degree d via scipy's linear programming."""
    from scipy.optimize import linprog

    n = f.n
    monomials = [m for m in range(1 << n) if bin(m).count("1") <= d]
    ncols = len(monomials)
    a_ub, b_ub = [], []
    for x in range(1 << n):
        row = [1.0 if m & ~x == 0 else 0.0 for m in monomials]
        lo, hi = 0.0, 1.0
        if f.table[x] is not None:
            v = float(f.table[x])
            lo = max(lo, v - float(eps))
            hi = min(hi, v + float(eps))
        a_ub.append([-c for c in row])
        b_ub.append(-lo)
        a_ub.append(row)
        b_ub.append(hi)
    res = linprog(c=[0.0] * ncols, A_ub=a_ub, b_ub=b_ub,
                  bounds=[(None, None)] * ncols, method="highs")
    return res.status == 0


def walk_path_oracle(p_one: Fraction, cap: int):
    """Per-gadget statistics by exhaustive enumeration of outcome paths.

    Full-length outcome tuples are enumerated with their full probability;
    outcomes after absorption do not advance the walk, so the suffix mass
    sums to one and each stopped prefix is counted exactly once.
    """
    p_one = Fraction(p_one)
    label1 = Fraction(0)
    expected_runs = Fraction(0)
    for bits in itertools.product((0, 1), repeat=cap):
        prob = Fraction(1)
        for b in bits:
            prob *= p_one if b else (1 - p_one)
        s = 0
        runs = 0
        alive = True
        for b in bits:
            if not alive:
                break
            runs += 1
            s += 1 if b else -1
            if s < 0:
                alive = False
        if alive and s > 0:
            label1 += prob
        expected_runs += prob * runs
    return label1, expected_runs
