"""Exact-rational linear programming with certificates, and a certified
sandwich solver for the geometric-mean weight-scheme programs.

The LP path is a dense two-phase tableau simplex over Fractions with
Bland's pivoting rule (lowest index enters; ratio ties leave by lowest
basis index), which guarantees termination. Every answer ships with a
witness that an independent checker re-verifies from scratch: a primal/dual
pair with equal objectives for optima, a Farkas vector for infeasibility,
and an improving ray for unbounded programs.

The geometric-mean program (min of the max row sum subject to
sum_i sqrt(q(x,i) q(y,i)) >= 1 over constrained pairs) is convex; it is
solved numerically, the feasible point is rounded outward to rationals and
re-checked in exact arithmetic (upper bound), and the solver duals are
rounded into a feasible point of the dual program whose per-index matrix
conditions are certified by exact rational LDL^T (lower bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import InputError, InternalCheckError, ResourceError
from .exactmath import dyadic_ceil, dyadic_round, frac_str, surd_sum_sign

NONZERO_CAP = 50_000

LE, GE, EQ = "<=", ">=", "=="


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: dict
    rel: str
    rhs: Fraction

    def evaluate(self, assignment) -> Fraction:
        return sum((c * assignment.get(v, Fraction(0)) for v, c in self.coeffs.items()),
                   Fraction(0))

    def satisfied(self, assignment) -> bool:
        lhs = self.evaluate(assignment)
        if self.rel == LE:
            return lhs <= self.rhs
        if self.rel == GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class LinearProgram:
    """Named-variable LP; variables are nonnegative unless listed in free_vars."""

    objective: dict
    sense: str  # 'min' or 'max'
    constraints: tuple
    free_vars: frozenset = frozenset()

    def variables(self) -> list:
        seen = dict.fromkeys(self.objective)
        for con in self.constraints:
            seen.update(dict.fromkeys(con.coeffs))
        return sorted(seen)

    def nonzeros(self) -> int:
        return sum(len(c.coeffs) for c in self.constraints)


@dataclass
class CertifiedValue:
    """A two-sided certified value. For exact LPs lower == upper."""

    status: str  # 'optimal' | 'infeasible' | 'unbounded'
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    witness_primal: dict = field(default_factory=dict)
    witness_dual: dict = field(default_factory=dict)
    gap_met: bool = True
    notes: dict = field(default_factory=dict)

    @property
    def value(self) -> Fraction:
        if self.status != "optimal":
            raise InputError(f"no optimum available (status {self.status})")
        return self.upper


def lp_to_text(lp: LinearProgram) -> str:
    """Dump in the plain-text LP interchange format for external cross-checks."""
    def term(c, v):
        sign = "+" if c >= 0 else "-"
        return f"{sign} {frac_str(abs(c))} {v}"

    lines = ["Minimize" if lp.sense == "min" else "Maximize"]
    obj = " ".join(term(c, v) for v, c in sorted(lp.objective.items())) or "0"
    lines.append(" obj: " + obj.lstrip("+ "))
    lines.append("Subject To")
    for con in lp.constraints:
        body = " ".join(term(c, v) for v, c in sorted(con.coeffs.items()))
        op = {LE: "<=", GE: ">=", EQ: "="}[con.rel]
        lines.append(f" {con.name}: {body.lstrip('+ ')} {op} {frac_str(con.rhs)}")
    if lp.free_vars:
        lines.append("Free")
        for v in sorted(lp.free_vars):
            lines.append(f" {v}")
    lines.append("End")
    return "\n".join(lines)


class _Standardized:
    """min c.x s.t. Ax = b, x >= 0, with bookkeeping back to the original LP."""

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        names = lp.variables()
        self.col_of = {}
        self.neg_col = {}    # second column of a free variable (x = x+ - x-)
        self.col_kind = []   # ('var', name, +1) / ('var', name, -1) / ('slack', row)
        for name in names:
            self.col_of[name] = len(self.col_kind)
            self.col_kind.append(("var", name, 1))
            if name in lp.free_vars:
                self.neg_col[name] = len(self.col_kind)
                self.col_kind.append(("var", name, -1))
        sign = 1 if lp.sense == "min" else -1
        ncols = len(self.col_kind)
        self.rows = []       # list of (coeff list, rhs)
        self.row_flip = []   # -1 if the original row was negated to make rhs >= 0
        self.row_rel = []
        self.slack_col = {}
        for con in lp.constraints:
            coeffs = [Fraction(0)] * ncols
            for name, c in con.coeffs.items():
                coeffs[self.col_of[name]] += Fraction(c)
                if name in self.neg_col:
                    coeffs[self.neg_col[name]] -= Fraction(c)
            rhs = Fraction(con.rhs)
            rel = con.rel
            flip = 1
            if rhs < 0:
                coeffs = [-c for c in coeffs]
                rhs = -rhs
                rel = {LE: GE, GE: LE, EQ: EQ}[rel]
                flip = -1
            self.rows.append((coeffs, rhs))
            self.row_flip.append(flip)
            self.row_rel.append(rel)
        # slack / surplus columns
        for ridx, rel in enumerate(self.row_rel):
            if rel in (LE, GE):
                self.slack_col[ridx] = len(self.col_kind)
                self.col_kind.append(("slack", ridx))
                for r2, (coeffs, _) in enumerate(self.rows):
                    coeffs.append(Fraction(1 if (r2 == ridx and rel == LE) else
                                           (-1 if (r2 == ridx and rel == GE) else 0)))
        self.nstruct = len(self.col_kind)
        self.cost = [Fraction(0)] * self.nstruct
        for name, c in lp.objective.items():
            self.cost[self.col_of[name]] += sign * Fraction(c)
            if name in self.neg_col:
                self.cost[self.neg_col[name]] -= sign * Fraction(c)
        self.sign = sign

    def extract(self, xcols) -> dict:
        out = {}
        for j, kind in enumerate(self.col_kind[:self.nstruct]):
            if kind[0] == "var":
                out.setdefault(kind[1], Fraction(0))
                out[kind[1]] += kind[2] * xcols[j]
        return out


def _pivot(tab, basis, pr, pc):
    prow = tab[pr]
    piv = prow[pc]
    inv = Fraction(1) / piv
    tab[pr] = [e * inv for e in prow]
    prow = tab[pr]
    for i, row in enumerate(tab):
        if i == pr:
            continue
        f = row[pc]
        if f:
            tab[i] = [a - f * b for a, b in zip(row, prow)]
    basis[pr] = pc


def _simplex(tab, basis, n_allowed):
    """Minimize over the tableau (rows augmented with rhs at index -1).

    Bland's rule: lowest eligible column enters; ratio ties leave by the
    lowest basic variable index. Columns >= n_allowed may not enter.
    Returns ('optimal', None) or ('unbounded', entering_col).
    """
    m = len(basis)
    while True:
        red = tab[m]
        pc = -1
        for j in range(n_allowed):
            if red[j] < 0:
                pc = j
                break
        if pc < 0:
            return "optimal", None
        pr, best = -1, None
        for i in range(m):
            a = tab[i][pc]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[pr]):
                    best, pr = ratio, i
        if pr < 0:
            return "unbounded", pc
        _pivot(tab, basis, pr, pc)


def solve_lp_exact(lp: LinearProgram) -> CertifiedValue:
    """Exact optimum with verified primal/dual witnesses.

    Infeasible programs return a Farkas-style certificate; unbounded ones a
    ray witness. All certificates are re-verified by direct substitution
    before the result is returned.
    """
    if lp.nonzeros() > NONZERO_CAP:
        raise ResourceError(f"LP has {lp.nonzeros()} nonzeros, cap {NONZERO_CAP}")
    if lp.sense not in ("min", "max"):
        raise InputError("sense must be 'min' or 'max'")
    std = _Standardized(lp)
    m = len(std.rows)
    n0 = std.nstruct

    # phase 1 tableau: structural cols, artificial cols, rhs
    art_of_row = {}
    ncols = n0
    need_art = []
    for ridx in range(m):
        if std.row_rel[ridx] == LE:
            continue
        need_art.append(ridx)
    for ridx in need_art:
        art_of_row[ridx] = ncols
        ncols += 1
    tab = []
    basis = []
    for ridx, (coeffs, rhs) in enumerate(std.rows):
        row = list(coeffs) + [Fraction(0)] * (ncols - n0) + [rhs]
        if ridx in art_of_row:
            row[art_of_row[ridx]] = Fraction(1)
            basis.append(art_of_row[ridx])
        else:
            basis.append(std.slack_col[ridx])
        tab.append(row)
    phase1_cost = [Fraction(0)] * (ncols + 1)
    for ridx in art_of_row:
        phase1_cost[art_of_row[ridx]] = Fraction(1)
    # reduced-cost row for phase 1: c minus the basic rows' contributions
    red = list(phase1_cost)
    for i, b in enumerate(basis):
        if phase1_cost[b]:
            red = [r - phase1_cost[b] * a for r, a in zip(red, tab[i])]
    tab.append(red)
    status, _ = _simplex(tab, basis, ncols)
    if status != "optimal":
        raise InternalCheckError("phase 1 cannot be unbounded")
    phase1_val = -tab[m][-1]
    if phase1_val > 0:
        y = _dual_from_tableau(tab, std, art_of_row, phase1_cost, m)
        farkas = _verify_farkas(lp, std, y)
        return CertifiedValue(status="infeasible", witness_dual={"farkas": farkas})

    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= n0:
            pc = next((j for j in range(n0) if tab[i][j] != 0), None)
            if pc is None:
                continue  # redundant row, keep artificial at zero
            _pivot(tab, basis, i, pc)

    # phase 2 with the real objective; artificial columns may not re-enter
    cost2 = list(std.cost) + [Fraction(0)] * (ncols - n0) + [Fraction(0)]
    red = list(cost2)
    for i, b in enumerate(basis):
        if cost2[b]:
            red = [r - cost2[b] * a for r, a in zip(red, tab[i])]
    tab[m] = red
    status, pc = _simplex(tab, basis, n0)
    if status == "unbounded":
        ray = _build_ray(tab, basis, pc, n0, m)
        rexp = std.extract(ray)
        _verify_ray(lp, rexp)
        return CertifiedValue(status="unbounded", witness_dual={"ray": rexp})

    xcols = [Fraction(0)] * ncols
    for i, b in enumerate(basis):
        xcols[b] = tab[i][-1]
    primal = std.extract(xcols)
    value = std.sign * sum((std.cost[j] * xcols[j] for j in range(n0)), Fraction(0))
    y = _dual_from_tableau(tab, std, art_of_row, cost2, m)
    duals = _map_duals(lp, std, y)
    cert = CertifiedValue(status="optimal", lower=value, upper=value,
                          witness_primal=primal, witness_dual=duals)
    verify_lp_certificate(lp, cert)
    return cert


def _build_ray(tab, basis, pc, n0, m):
    ray = [Fraction(0)] * n0
    if pc < n0:
        ray[pc] = Fraction(1)
    for i in range(m):
        if basis[i] < n0:
            ray[basis[i]] = -tab[i][pc]
    return ray


def _dual_from_tableau(tab, std, art_of_row, cost_vec, m):
    """Recover y from reduced costs of the initial identity columns."""
    y = []
    for ridx in range(m):
        j = art_of_row.get(ridx, std.slack_col.get(ridx))
        if j is None:
            raise InternalCheckError("row lacks an initial identity column")
        yi = cost_vec[j] - tab[m][j]
        y.append(yi * std.row_flip[ridx])
    return y


def _map_duals(lp, std, y):
    duals = {}
    for ridx, con in enumerate(lp.constraints):
        duals[con.name] = std.sign * y[ridx]
    return duals


def _verify_farkas(lp, std, y):
    """Check y'A <= 0 on every standard-form column and y'b > 0; return the
    certificate in terms of original constraint names."""
    m = len(std.rows)
    yb = Fraction(0)
    cols = std.nstruct
    combo = [Fraction(0)] * cols
    for ridx in range(m):
        coeffs, rhs = std.rows[ridx]
        yi = y[ridx] * std.row_flip[ridx]  # back to the normalized row
        if std.row_rel[ridx] == LE and yi > 0:
            raise InternalCheckError("Farkas sign violated on a <= row")
        if std.row_rel[ridx] == GE and yi < 0:
            raise InternalCheckError("Farkas sign violated on a >= row")
        yb += yi * rhs
        for j in range(cols):
            combo[j] += yi * coeffs[j]
    if any(c > 0 for c in combo):
        raise InternalCheckError("Farkas combination not nonpositive")
    if yb <= 0:
        raise InternalCheckError("Farkas value not positive")
    return {lp.constraints[r].name: y[r] for r in range(m)}


def _verify_ray(lp, ray):
    for name in ray:
        if name not in lp.free_vars and ray[name] < 0:
            raise InternalCheckError("ray violates nonnegativity")
    direction = sum((c * ray.get(v, Fraction(0)) for v, c in lp.objective.items()),
                    Fraction(0))
    improving = direction < 0 if lp.sense == "min" else direction > 0
    if not improving:
        raise InternalCheckError("ray does not improve the objective")
    for con in lp.constraints:
        drift = sum((c * ray.get(v, Fraction(0)) for v, c in con.coeffs.items()),
                    Fraction(0))
        ok = (con.rel == LE and drift <= 0) or (con.rel == GE and drift >= 0) \
            or (con.rel == EQ and drift == 0)
        if not ok:
            raise InternalCheckError("ray leaves the feasible cone")


def verify_lp_certificate(lp: LinearProgram, cert: CertifiedValue) -> bool:
    """Independent check of an optimal certificate by direct substitution.

    Verifies primal feasibility, dual feasibility (sign conditions plus
    reduced costs of the right sign for every variable), and exact equality
    of the primal and dual objective values. Raises on any failure.
    """
    if cert.status != "optimal":
        raise InputError("only optimal certificates are verified here")
    x = cert.witness_primal
    y = cert.witness_dual
    for name, val in x.items():
        if name not in lp.free_vars and val < 0:
            raise InternalCheckError(f"primal witness negative at {name}")
    for con in lp.constraints:
        if not con.satisfied(x):
            raise InternalCheckError(f"primal witness violates {con.name}")
    minimize = lp.sense == "min"
    for con in lp.constraints:
        yi = y[con.name]
        if con.rel == GE and (yi < 0 if minimize else yi > 0):
            raise InternalCheckError(f"dual sign wrong on {con.name}")
        if con.rel == LE and (yi > 0 if minimize else yi < 0):
            raise InternalCheckError(f"dual sign wrong on {con.name}")
    reduced = dict.fromkeys(lp.variables(), Fraction(0))
    for con in lp.constraints:
        yi = y[con.name]
        if yi:
            for v, c in con.coeffs.items():
                reduced[v] += yi * c
    for v in lp.variables():
        rc = Fraction(lp.objective.get(v, 0)) - reduced[v]
        if v in lp.free_vars:
            if rc != 0:
                raise InternalCheckError(f"free variable {v} has nonzero reduced cost")
        elif minimize and rc < 0:
            raise InternalCheckError(f"reduced cost negative at {v}")
        elif not minimize and rc > 0:
            raise InternalCheckError(f"reduced cost positive at {v}")
    primal_obj = sum((Fraction(c) * x.get(v, Fraction(0))
                      for v, c in lp.objective.items()), Fraction(0))
    dual_obj = sum((y[c.name] * c.rhs for c in lp.constraints), Fraction(0))
    if primal_obj != dual_obj or primal_obj != cert.upper:
        raise InternalCheckError("strong duality does not hold for the certificate")
    return True


# ---------------------------------------------------------------------------
# Geometric-mean weight-scheme programs (positive / singleton adversary)
# ---------------------------------------------------------------------------

MAX_GEOM_VARS = 64
DEFAULT_REL_GAP = Fraction(1, 10_000)


@dataclass(frozen=True)
class GeomPair:
    """One feasibility constraint: sum over indices of sqrt(q(x,i) q(y,i)) >= 1."""

    x: object
    y: object
    indices: tuple


def check_geom_feasible(scheme: dict, pairs: Sequence[GeomPair]):
    """Exactly decide feasibility of a rational scheme for all pair constraints.

    Returns None if feasible, otherwise the first violated pair. Sign
    decisions on the surd sums are rigorous.
    """
    for p in pairs:
        terms = [(Fraction(1), Fraction(scheme.get((p.x, i), 0)) * Fraction(scheme.get((p.y, i), 0)))
                 for i in p.indices]
        if surd_sum_sign(Fraction(-1), terms) < 0:
            return p
    return None


def _ldl_psd(mat):
    """Exact LDL^T check that a symmetric rational matrix is PSD.

    Only the upper triangle is maintained; by symmetry the multiplier for
    row i in round k is a[k][i] / a[k][k].
    """
    n = len(mat)
    a = [row[:] for row in mat]
    for k in range(n):
        piv = a[k][k]
        if piv < 0:
            return False
        if piv == 0:
            if any(a[k][j] != 0 for j in range(k + 1, n)):
                return False
            continue
        for i in range(k + 1, n):
            f = a[k][i] / piv
            if f:
                for j in range(i, n):
                    a[i][j] -= f * a[k][j]
    return True


def _certified_dual_lower(dom, pairs, mu, lam) -> Fraction:
    """Rigorous lower bound from a feasible point of the dual program.

    Weak duality: whenever lam >= 0 sums to exactly 1, mu >= 0, and for
    every index i the matrix diag(lam) - (1/2) M_i is PSD (M_i collects the
    multipliers of pairs differing at i), every feasible scheme q satisfies
    max_x sum_i q(x,i) >= sum of mu. Both conditions are verified in exact
    rational arithmetic; mu is scaled down slightly until the PSD checks
    pass. A PSD certificate suffices even though s = sqrt(q) is sign
    constrained, because the off-diagonal entries are nonpositive.
    """
    floor = Fraction(1, 10**10)
    lam_r = {}
    for x in dom:
        v = max(dyadic_round(float(lam.get(x, 0.0)), 48), Fraction(0))
        lam_r[x] = v if v > floor else Fraction(0)
    total = sum(lam_r.values())
    if total <= 0:
        return Fraction(0)
    lam_r = {x: v / total for x, v in lam_r.items()}
    mu_max = max((float(v) for v in mu.values()), default=0.0)
    cutoff = max(mu_max * 1e-9, 1e-12)
    mu_r = {}
    for p in pairs:
        w = float(mu.get((p.x, p.y), 0.0))
        if w > cutoff and lam_r[p.x] > 0 and lam_r[p.y] > 0:
            mu_r[(p.x, p.y)] = dyadic_round(w, 48)
    if not mu_r:
        return Fraction(0)
    indices = sorted({i for p in pairs for i in p.indices})
    for num, den in ((1, 1), (999_999_999, 10**9), (999_999, 10**6),
                     (999, 1000), (9, 10), (1, 2)):
        scale = Fraction(num, den)
        ok = True
        for i in indices:
            touched = sorted({x for p in pairs for x in (p.x, p.y)
                              if i in p.indices and (p.x, p.y) in mu_r})
            if not touched:
                continue
            pos = {x: j for j, x in enumerate(touched)}
            mat = [[Fraction(0)] * len(touched) for _ in touched]
            for x in touched:
                mat[pos[x]][pos[x]] = lam_r[x]
            for p in pairs:
                if i in p.indices and (p.x, p.y) in mu_r:
                    half = scale * mu_r[(p.x, p.y)] / 2
                    a, b = pos[p.x], pos[p.y]
                    mat[a][b] -= half
                    mat[b][a] -= half
            if not _ldl_psd(mat):
                ok = False
                break
        if ok:
            return scale * sum(mu_r.values())
    return Fraction(0)


def solve_geom_min(dom: Sequence, pairs: Sequence[GeomPair],
                   rel_gap: Fraction = DEFAULT_REL_GAP) -> CertifiedValue:
    """Certified sandwich for min of max_x sum_i q(x,i) subject to
    sum_{i in indices} sqrt(q(x,i) q(y,i)) >= 1 for every pair.

    The upper bound is the exact objective of a rational scheme whose
    feasibility is re-checked rigorously after outward rounding; the lower
    bound is the exactly verified value of a feasible dual point. The
    result is flagged gap_unmet when the sandwich is wider than rel_gap
    relative.
    """
    dom = list(dom)
    pairs = list(pairs)
    if not pairs:
        return CertifiedValue(status="optimal", lower=Fraction(0), upper=Fraction(0),
                              witness_primal={}, witness_dual={})
    keys = sorted({(x, i) for p in pairs for i in p.indices for x in (p.x, p.y)})
    if len(keys) > MAX_GEOM_VARS:
        raise ResourceError(f"{len(keys)} weight variables exceed the cap {MAX_GEOM_VARS}")

    import cvxpy as cp

    kidx = {k: i for i, k in enumerate(keys)}
    row_keys = {x: [j for j, (xx, _) in enumerate(keys) if xx == x] for x in dom}
    q = cp.Variable(len(keys), nonneg=True)
    m_var = cp.Variable()
    cons = []
    con_inputs = []
    for x in dom:
        if row_keys[x]:
            cons.append(cp.sum(q[row_keys[x]]) <= m_var)
            con_inputs.append(x)
    pair_cons = []
    for p in pairs:
        terms = [cp.geo_mean(cp.hstack([q[kidx[(p.x, i)]], q[kidx[(p.y, i)]]]))
                 for i in p.indices]
        pair_cons.append(cp.sum(cp.hstack(terms)) >= 1)
    prob = cp.Problem(cp.Minimize(m_var), cons + pair_cons)

    solver_ladder = [
        (cp.CLARABEL, {}),
        (cp.CLARABEL, {"tol_gap_abs": 1e-12, "tol_gap_rel": 1e-12,
                       "tol_feas": 1e-12, "max_iter": 200_000}),
        (cp.SCS, {"eps": 1e-11, "max_iters": 200_000}),
        (cp.CVXOPT, {}),
    ]
    best = None
    for solver, opts in solver_ladder:
        try:
            prob.solve(solver=solver, **opts)
        except (cp.error.SolverError, cp.error.DCPError):
            continue
        if prob.status not in ("optimal", "optimal_inaccurate"):
            continue
        qval = np.maximum(np.asarray(q.value).ravel(), 0.0)

        # rational upper bound by outward rounding with slack inflation
        scheme = None
        for inflate in (1e-8, 1e-6, 1e-4, 1e-2):
            cand = {k: dyadic_ceil(float(qval[kidx[k]]) * (1 + inflate) + 1e-12, 48)
                    for k in keys}
            if check_geom_feasible(cand, pairs) is None:
                scheme = cand
                break
        if scheme is None:
            continue
        upper = max(sum((scheme[keys[j]] for j in row_keys[x]), Fraction(0)) for x in dom)

        lam = {x: float(c.dual_value) for x, c in zip(con_inputs, cons)
               if c.dual_value is not None}
        mu = {}
        for p, c in zip(pairs, pair_cons):
            d = float(c.dual_value) if c.dual_value is not None else 0.0
            mu[(p.x, p.y)] = max(d, 0.0)
        lower = _certified_dual_lower(dom, pairs, mu, lam)
        if best is None or (upper - lower) < (best[0] - best[1]):
            best = (upper, lower, scheme, mu, lam)
        if upper == 0 or (upper - lower) / upper <= rel_gap:
            break
    if best is None:
        raise InternalCheckError("no convex solver produced a usable point")
    upper, lower, scheme, mu, lam = best
    gap_met = upper == 0 or (upper - lower) / upper <= rel_gap
    return CertifiedValue(status="optimal", lower=lower, upper=upper,
                          witness_primal=scheme,
                          witness_dual={"pair_multipliers": mu, "row_multipliers": lam},
                          gap_met=gap_met,
                          notes={} if gap_met else {"gap_unmet": True})
