"""Exact simulation of classical communication protocols on block-composed
functions, and information-cost extraction.

Protocols are finite binary trees; each internal node names a speaker and
a message table from (speaker's input tuple, public random label) to a
bit, with the transcript prefix implicit in the node's position. Leaves
either carry a fixed output symbol or a table letting the last receiver
compute the output from their own input. All distributions are exact
rational tables; entropic quantities are evaluated with high-precision
logarithms (60+ digits), so identities like the chain rule can be checked
to 1e-30.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from .boolfn import BoolObject, as_relation, popcount
from .errors import InputError, InternalCheckError, ResourceError
from .gadgets import Gadget, SelfReduction, s_sample

JOINT_CAP = 1 << 26
DEFAULT_DPS = 80


@dataclass(frozen=True)
class ProtocolNode:
    speaker: str          # 'A' or 'B'
    msg: dict             # (input tuple, r label) -> bit
    children: tuple       # (node index for bit 0, node index for bit 1)


@dataclass(frozen=True)
class ProtocolLeaf:
    output: object = None       # fixed symbol, or None when bob_output is set
    bob_output: Optional[dict] = None   # (ys tuple, r label) -> symbol


@dataclass(frozen=True)
class ProtocolTree:
    """A communication protocol with explicit public randomness."""

    nodes: tuple
    r_space: tuple = (("-", Fraction(1)),)   # (label, probability) pairs

    def __post_init__(self):
        total = sum((p for _, p in self.r_space), Fraction(0))
        if total != 1:
            raise InputError("public randomness probabilities must sum to 1")
        if len(self.r_space) > 256:
            raise ResourceError("public randomness space capped at 256 labels")

    def cc(self) -> int:
        """Communication cost: the number of bits exchanged (max leaf depth)."""
        def depth(idx):
            node = self.nodes[idx]
            if isinstance(node, ProtocolLeaf):
                return 0
            return 1 + max(depth(c) for c in node.children)
        return depth(0)

    def run(self, xs: tuple, ys: tuple, r) -> tuple:
        """Deterministic path evaluation: (transcript bits, output symbol)."""
        idx = 0
        transcript = []
        while True:
            node = self.nodes[idx]
            if isinstance(node, ProtocolLeaf):
                if node.bob_output is not None:
                    return tuple(transcript), node.bob_output[(ys, r)]
                return tuple(transcript), node.output
            inp = xs if node.speaker == "A" else ys
            try:
                bit = node.msg[(inp, r)]
            except KeyError:
                raise InputError("message table lacks an entry for this input") from None
            transcript.append(bit)
            idx = node.children[bit]


def run_protocol(tree: ProtocolTree, xs: tuple, ys: tuple, r) -> tuple:
    return tree.run(xs, ys, r)


@dataclass(frozen=True)
class LiftedDistribution:
    """Product distribution with coordinate i uniform over the gadget
    preimage of z_i."""

    gadget: Gadget
    n: int
    z: int                 # target string, bit i-1 of the integer encoding

    def coordinate_support(self, i: int) -> list:
        return self.gadget.preimage((self.z >> (i - 1)) & 1)

    def support(self):
        """Iterate ((xs, ys), probability) over the product support."""
        per_coord = [self.coordinate_support(i) for i in range(1, self.n + 1)]
        prob = Fraction(1)
        for s in per_coord:
            prob /= len(s)
        for combo in itertools.product(*per_coord):
            xs = tuple(c[0] for c in combo)
            ys = tuple(c[1] for c in combo)
            yield (xs, ys), prob


@dataclass
class JointDistribution:
    """Named finite variables with an exact rational probability table."""

    variables: tuple
    table: dict            # assignment tuple -> Fraction

    def __post_init__(self):
        total = sum(self.table.values())
        if total != 1:
            raise InputError("joint probabilities must sum to 1")

    def index_of(self, names) -> list:
        return [self.variables.index(v) for v in names]

    def marginal(self, names) -> dict:
        idx = self.index_of(names)
        out = {}
        for key, p in self.table.items():
            sub = tuple(key[i] for i in idx)
            out[sub] = out.get(sub, Fraction(0)) + p
        return out


def cond_mutual_info(joint: JointDistribution, a_vars, b_vars, c_vars,
                     dps: int = DEFAULT_DPS):
    """I(A : B | C) in bits from exact probabilities.

    Evaluated as the expectation of log2( p(abc) p(c) / (p(ac) p(bc)) )
    with dps-digit arithmetic; the probability ratios themselves are exact
    rationals.
    """
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for p, ratio in _cmi_terms(joint, a_vars, b_vars, c_vars):
            total += _mpf_frac(p) * mpmath.log(_mpf_frac(ratio), 2)
        return total


def cond_mutual_info_interval(joint: JointDistribution, a_vars, b_vars, c_vars,
                              prec_bits: int = 160):
    """Outward-rounded interval enclosure of I(A : B | C) in bits."""
    old = mpmath.iv.prec
    try:
        mpmath.iv.prec = prec_bits
        ln2 = mpmath.iv.log(mpmath.iv.mpf(2))
        total = mpmath.iv.mpf(0)
        for p, ratio in _cmi_terms(joint, a_vars, b_vars, c_vars):
            total += _iv_frac(p) * mpmath.iv.log(_iv_frac(ratio)) / ln2
        return total
    finally:
        mpmath.iv.prec = old


def _cmi_terms(joint, a_vars, b_vars, c_vars):
    a_vars, b_vars, c_vars = list(a_vars), list(b_vars), list(c_vars)
    p_abc = joint.marginal(a_vars + b_vars + c_vars)
    p_ac = joint.marginal(a_vars + c_vars)
    p_bc = joint.marginal(b_vars + c_vars)
    p_c = joint.marginal(c_vars) if c_vars else {(): Fraction(1)}
    na, nb = len(a_vars), len(b_vars)
    for key, p in p_abc.items():
        if p == 0:
            continue
        ka = key[:na]
        kb = key[na:na + nb]
        kc = key[na + nb:]
        yield p, (p * p_c[kc]) / (p_ac[ka + kc] * p_bc[kb + kc])


def _mpf_frac(fr: Fraction):
    return mpmath.mpf(fr.numerator) / mpmath.mpf(fr.denominator)


def _iv_frac(fr: Fraction):
    return mpmath.iv.mpf(fr.numerator) / mpmath.iv.mpf(fr.denominator)


def transcript_joint(tree: ProtocolTree, lifted: LiftedDistribution) -> JointDistribution:
    """Exact joint of inputs, dependency breakers, randomness, and transcript.

    Variables: X1..Xn, Y1..Yn, D (uniform bit mask), U (the per-coordinate
    selection U_i = X_i when D_i = 0 else Y_i), R, T. Marginals are
    re-verified: the inputs follow the product distribution and D is
    uniform and independent.
    """
    n = lifted.n
    sizes = [len(lifted.coordinate_support(i)) for i in range(1, n + 1)]
    entries = math.prod(sizes) * (1 << n) * len(tree.r_space)
    if entries > JOINT_CAP:
        raise ResourceError(f"joint would have {entries} entries, cap {JOINT_CAP}")
    names = tuple([f"X{i}" for i in range(1, n + 1)] +
                  [f"Y{i}" for i in range(1, n + 1)] + ["D", "U", "R", "T"])
    table = {}
    d_prob = Fraction(1, 1 << n)
    for (xs, ys), p_in in lifted.support():
        for d in range(1 << n):
            u = tuple(xs[i] if not (d >> i) & 1 else ys[i] for i in range(n))
            for r_label, p_r in tree.r_space:
                transcript, _ = tree.run(xs, ys, r_label)
                key = xs + ys + (d, u, r_label, transcript)
                prob = p_in * d_prob * p_r
                table[key] = table.get(key, Fraction(0)) + prob
    joint = JointDistribution(variables=names, table=table)
    _verify_lift_marginals(joint, lifted)
    return joint


def _verify_lift_marginals(joint: JointDistribution, lifted: LiftedDistribution):
    n = lifted.n
    for i in range(1, n + 1):
        marg = joint.marginal([f"X{i}", f"Y{i}"])
        cls = lifted.coordinate_support(i)
        want = Fraction(1, len(cls))
        if set(marg) != set(cls) or any(v != want for v in marg.values()):
            raise InternalCheckError(f"coordinate {i} marginal is not uniform")
    dm = joint.marginal(["D"])
    if any(v != Fraction(1, 1 << n) for v in dm.values()) or len(dm) != (1 << n):
        raise InternalCheckError("dependency-breaking mask is not uniform")


def verify_dependency_breaking(joint: JointDistribution, n: int) -> bool:
    """Check the two defining properties of the selector variables exactly:
    the selected side is copied pointwise, and conditioned on (D, U) the
    two halves of every coordinate are independent."""
    names = dict(enumerate(joint.variables))
    for key, p in joint.table.items():
        if p == 0:
            continue
        vals = {names[i]: v for i, v in enumerate(key)}
        d, u = vals["D"], vals["U"]
        for i in range(n):
            want = vals[f"X{i + 1}"] if not (d >> i) & 1 else vals[f"Y{i + 1}"]
            if u[i] != want:
                return False
    for i in range(1, n + 1):
        mxy = joint.marginal([f"X{i}", f"Y{i}", "D", "U"])
        mx = joint.marginal([f"X{i}", "D", "U"])
        my = joint.marginal([f"Y{i}", "D", "U"])
        mdu = joint.marginal(["D", "U"])
        for (x, y, d, u), p in mxy.items():
            if p * mdu[(d, u)] != mx[(x, d, u)] * my[(y, d, u)]:
                return False
    return True


@dataclass
class LiftScheme:
    """Per-coordinate information weights extracted from one protocol run."""

    z: int
    weights: list          # primary variant, index i-1
    weights_literal: list  # the displayed variant whose second term vanishes
    cc: int
    total: object          # mpf sum of the primary weights

    def weight(self, i: int):
        return self.weights[i - 1]


def lift_weight_scheme(tree: ProtocolTree, f: BoolObject, gadget: Gadget,
                       z: int, dps: int = DEFAULT_DPS,
                       rigorous_cc_check: bool = False) -> LiftScheme:
    """Information-cost weights q(z, i) for one composed input distribution.

    The primary variant of coordinate i is
    I(X_i : T | X_<i, Y, D, U, R) + I(Y_i : T | Y_<i, X, D, U, R); the
    literal variant replaces the second mutual information's first argument
    with X_i, which makes that term vanish (X is in the conditioning), and
    is logged for comparison. The sum of the primary weights never exceeds
    the communication cost; with rigorous_cc_check the bound is certified
    with outward-rounded interval arithmetic.
    """
    n = f.n
    lifted = LiftedDistribution(gadget=gadget, n=n, z=z)
    joint = transcript_joint(tree, lifted)
    xs_all = [f"X{i}" for i in range(1, n + 1)]
    ys_all = [f"Y{i}" for i in range(1, n + 1)]
    weights = []
    literal = []
    conds = []
    with mpmath.workdps(dps):
        for i in range(1, n + 1):
            cond_x = xs_all[:i - 1] + ys_all + ["D", "U", "R"]
            cond_y = ys_all[:i - 1] + xs_all + ["D", "U", "R"]
            conds.append((cond_x, cond_y))
            term_x = cond_mutual_info(joint, [f"X{i}"], ["T"], cond_x, dps)
            term_y = cond_mutual_info(joint, [f"Y{i}"], ["T"], cond_y, dps)
            term_literal = cond_mutual_info(joint, [f"X{i}"], ["T"], cond_y, dps)
            weights.append(term_x + term_y)
            literal.append(term_x + term_literal)
        cc = tree.cc()
        total = sum(weights, mpmath.mpf(0))
        if total > cc + mpmath.mpf(10) ** (-20):
            raise InternalCheckError("information weights exceed the communication cost")
    if rigorous_cc_check:
        box = mpmath.iv.mpf(0)
        for i, (cond_x, cond_y) in enumerate(conds, start=1):
            box += cond_mutual_info_interval(joint, [f"X{i}"], ["T"], cond_x)
            box += cond_mutual_info_interval(joint, [f"Y{i}"], ["T"], cond_y)
        if not box.b <= cc:
            raise InternalCheckError(
                "interval certification of the communication-cost bound failed")
    return LiftScheme(z=z, weights=weights, weights_literal=literal, cc=cc,
                      total=total)


@dataclass
class MinPairResult:
    value: object          # sum of coordinate-wise minima (mpf)
    block: tuple           # differing coordinates
    block1: tuple          # coordinates where the first input's weight is the minimum
    block2: tuple
    hybrid: int            # v agrees with w on block1, with z elsewhere
    scheme_z: LiftScheme
    scheme_w: LiftScheme


def min_pair_bound(tree: ProtocolTree, f: BoolObject, gadget: Gadget,
                   z: int, w: int, dps: int = DEFAULT_DPS) -> MinPairResult:
    """Sum of per-coordinate minima of the two lifted weight vectors,
    together with the block split and the hybrid input used downstream."""
    rel = as_relation(f)
    if rel.valid[z] & rel.valid[w]:
        raise InputError("inputs must have disjoint valid-output sets")
    qz = lift_weight_scheme(tree, f, gadget, z, dps)
    qw = lift_weight_scheme(tree, f, gadget, w, dps)
    block = tuple(i for i in range(1, f.n + 1) if (z ^ w) >> (i - 1) & 1)
    b1 = tuple(i for i in block if qz.weight(i) <= qw.weight(i))
    b2 = tuple(i for i in block if i not in b1)
    with mpmath.workdps(dps):
        value = sum((min(qz.weight(i), qw.weight(i)) for i in block), mpmath.mpf(0))
    hybrid = z
    for i in b1:
        hybrid ^= 1 << (i - 1)
    return MinPairResult(value=value, block=block, block1=b1, block2=b2,
                         hybrid=hybrid, scheme_z=qz, scheme_w=qw)


# ---------------------------------------------------------------------------
# The boosted distinguisher
# ---------------------------------------------------------------------------

def repetitions_for(eps: Fraction) -> int:
    """ceil((2/eps^2) ln(1/eps)), decided rigorously."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise InputError("eps must lie in (0, 1)")
    old = mpmath.iv.prec
    try:
        prec = 64
        while prec <= 4096:
            mpmath.iv.prec = prec
            e = mpmath.iv.mpf(eps.numerator) / mpmath.iv.mpf(eps.denominator)
            val = 2 / (e * e) * mpmath.iv.log(1 / e)
            ca = int(mpmath.ceil(mpmath.mpf(val.a)))
            cb = int(mpmath.ceil(mpmath.mpf(val.b)))
            if ca == cb:
                return ca
            prec *= 2
    finally:
        mpmath.iv.prec = old
    raise InternalCheckError("repetition count unresolved")


def _binomial_tail_ge(k: int, p: Fraction, threshold: int) -> Fraction:
    """Pr[Bin(k, p) >= threshold], exact."""
    p = Fraction(p)
    total = Fraction(0)
    for j in range(max(threshold, 0), k + 1):
        total += math.comb(k, j) * p ** j * (1 - p) ** (k - j)
    return total


def success_probability(tree: ProtocolTree, lifted: LiftedDistribution,
                        targets: frozenset) -> Fraction:
    """Exact probability that the protocol's output lands in the target set."""
    total = Fraction(0)
    for (xs, ys), p_in in lifted.support():
        for r_label, p_r in tree.r_space:
            _, out = tree.run(xs, ys, r_label)
            if out in targets:
                total += p_in * p_r
    return total


class CaseTwoError(InputError):
    """The first-case hypothesis fails; build the mirrored distinguisher."""

    def __init__(self, prob: Fraction):
        super().__init__(f"hybrid accepts the reference outputs with "
                         f"probability {prob} > 1/2; use the second case")
        self.prob = prob


@dataclass
class Distinguisher:
    """A k-fold repetition protocol for the base gadget.

    Each run embeds the gadget input into the coordinates where the
    reference and hybrid strings differ (via correlated sampling from
    shared randomness) and samples the remaining coordinates privately.
    The final output is 0 (the reference side) exactly when at least
    threshold of the k runs produced a symbol valid for the reference
    input. The worst-case error is computed exactly from the per-run
    success probabilities and binomial tails.
    """

    base: ProtocolTree
    gadget: Gadget
    n: int
    z: int
    hybrid: int
    targets: frozenset
    k: int
    threshold: int
    p_reference: Fraction   # per-run target probability under the reference
    p_hybrid: Fraction      # per-run target probability under the hybrid
    error_zero_inputs: Fraction
    error_one_inputs: Fraction

    @property
    def worst_error(self) -> Fraction:
        return max(self.error_zero_inputs, self.error_one_inputs)


def repetition_errors(k: int, eps: Fraction, p_reference: Fraction,
                      p_hybrid: Fraction) -> tuple:
    """Exact (error on 0-inputs, error on 1-inputs) of the k-fold rule."""
    threshold = _ceil_frac((1 - Fraction(eps)) * k)
    e0 = 1 - _binomial_tail_ge(k, p_reference, threshold)
    e1 = _binomial_tail_ge(k, p_hybrid, threshold)
    return e0, e1


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def build_distinguisher(tree: ProtocolTree, f: BoolObject, gadget: Gadget,
                        z: int, v: int, eps: Fraction) -> Distinguisher:
    """Boost a composed-function protocol into a gadget distinguisher.

    Preconditions verified exactly: the base protocol accepts the
    reference distribution with the complement of the target probability
    mass, and the hybrid accepts with probability at most 1/2 (otherwise
    CaseTwoError reports the mirrored case). The returned protocol's
    worst-case error is computed exactly and asserted at most eps.
    """
    eps = Fraction(eps)
    rel = as_relation(f)
    targets = frozenset(rel.valid[z])
    lifted_z = LiftedDistribution(gadget=gadget, n=f.n, z=z)
    lifted_v = LiftedDistribution(gadget=gadget, n=f.n, z=v)
    p_ref = success_probability(tree, lifted_z, targets)
    p_hyb = success_probability(tree, lifted_v, targets)
    if p_hyb > Fraction(1, 2):
        raise CaseTwoError(p_hyb)
    if p_ref < 1 - eps / 2:
        raise InputError("base protocol is not accurate enough on the reference input")
    k = repetitions_for(eps)
    threshold = _ceil_frac((1 - eps) * k)
    error0 = 1 - _binomial_tail_ge(k, p_ref, threshold)
    error1 = _binomial_tail_ge(k, p_hyb, threshold)
    if max(error0, error1) > eps:
        raise InternalCheckError("constructed distinguisher exceeds the error budget")
    return Distinguisher(base=tree, gadget=gadget, n=f.n, z=z, hybrid=v,
                         targets=targets, k=k, threshold=threshold,
                         p_reference=p_ref, p_hybrid=p_hyb,
                         error_zero_inputs=error0, error_one_inputs=error1)


def distinguisher_run_distribution(dist: Distinguisher, flip, sr: SelfReduction,
                                   ab: tuple) -> dict:
    """Exact single-run output distribution on a concrete gadget input.

    Enumerates the correlated-sampling randomness for the embedded
    coordinates and the private choices for the remaining coordinates,
    validating that the embedding realizes exactly the reference or hybrid
    product distribution.
    """
    n = dist.n
    b1 = [i for i in range(1, n + 1) if (dist.z ^ dist.hybrid) >> (i - 1) & 1]
    rest = [i for i in range(1, n + 1) if i not in b1]
    s_bits = tuple((dist.z >> (i - 1)) & 1 for i in b1)
    out = {}
    private_pools = [dist.gadget.preimage((dist.z >> (i - 1)) & 1) for i in rest]
    for draws in itertools.product(range(len(sr.support)), repeat=len(b1)):
        p_draw = Fraction(1)
        for dd in draws:
            p_draw *= sr.support[dd][2]
        emb_x, emb_y = s_sample(dist.gadget, flip, sr, s_bits, ab, draws)
        for combo in itertools.product(*private_pools):
            p_priv = p_draw
            for pool in private_pools:
                p_priv /= len(pool)
            xs = [0] * n
            ys = [0] * n
            for j, i in enumerate(b1):
                xs[i - 1], ys[i - 1] = emb_x[j], emb_y[j]
            for j, i in enumerate(rest):
                xs[i - 1], ys[i - 1] = combo[j]
            for r_label, p_r in dist.base.r_space:
                _, o = dist.base.run(tuple(xs), tuple(ys), r_label)
                key = o
                out[key] = out.get(key, Fraction(0)) + p_priv * p_r
    return out


# ---------------------------------------------------------------------------
# The repeat-until-majority scheduler for OR of noisy gadget evaluations
# ---------------------------------------------------------------------------

@dataclass
class GadgetWalkStats:
    label_one_probability: Fraction
    expected_runs: Fraction
    expected_runs_given_zero: Optional[Fraction]
    expected_runs_given_one: Optional[Fraction]


@dataclass
class ScheduleStats:
    n: int
    z: int
    delta: Fraction
    cap: int
    expected_zero_invocations: Fraction
    expected_one_invocations: Fraction
    detect_probability: Fraction     # a true 1-gadget labelled 1
    false_positive_probability: Fraction  # a true 0-gadget labelled 1
    output_one_probability: Fraction
    per_gadget: dict

    def zero_constant(self) -> float:
        zeros = self.n - popcount(self.z)
        return float(self.expected_zero_invocations) / max(zeros, 1)

    def one_constant(self) -> float:
        return float(self.expected_one_invocations) / max(math.log2(self.n), 1.0)

    def to_json_dict(self) -> dict:
        from .exactmath import frac_str
        return {
            "n": self.n, "z": format(self.z, f"0{self.n}b")[::-1],
            "delta": frac_str(self.delta), "cap": self.cap,
            "expected_zero_invocations": frac_str(self.expected_zero_invocations),
            "expected_one_invocations": frac_str(self.expected_one_invocations),
            "detect_probability": frac_str(self.detect_probability),
            "output_one_probability": frac_str(self.output_one_probability),
        }


def _walk_stats(p_one: Fraction, cap: int) -> GadgetWalkStats:
    """Absorbing-walk analysis of the repeat rule on a single gadget.

    State is the count of 1-outputs minus 0-outputs; the walk stops with
    label 0 upon reaching -1, and at the run cap it reports label 1 when
    the count is strictly positive and label 0 otherwise.
    """
    p_one = Fraction(p_one)
    dist = {0: Fraction(1)}
    expected_runs = Fraction(0)
    runs_to_label1 = Fraction(0)
    runs_to_label0 = Fraction(0)
    prob_label0 = Fraction(0)
    for t in range(1, cap + 1):
        alive = sum(dist.values())
        expected_runs += alive
        new = {}
        for s, p in dist.items():
            if p == 0:
                continue
            up = p * p_one
            down = p * (1 - p_one)
            new[s + 1] = new.get(s + 1, Fraction(0)) + up
            if s - 1 < 0:
                prob_label0 += down
                runs_to_label0 += down * t
            else:
                new[s - 1] = new.get(s - 1, Fraction(0)) + down
        dist = new
    label1 = sum((p for s, p in dist.items() if s > 0), Fraction(0))
    stuck_zero = sum((p for s, p in dist.items() if s <= 0), Fraction(0))
    prob_label0 += stuck_zero
    runs_to_label0 += stuck_zero * cap
    runs_to_label1 = label1 * cap
    return GadgetWalkStats(
        label_one_probability=label1,
        expected_runs=expected_runs,
        expected_runs_given_zero=runs_to_label0 / prob_label0 if prob_label0 else None,
        expected_runs_given_one=Fraction(cap) if label1 else None,
    )


def noisy_or_schedule(n: int, z: int, delta: Fraction,
                      cap: Optional[int] = None) -> ScheduleStats:
    """Exact expected invocation counts for the sequential OR strategy.

    Gadgets are evaluated in order with a noisy oracle of per-run error
    delta; a gadget is abandoned as labelled 0 as soon as its 0-outputs
    outnumber its 1-outputs, and believed to be 1 (halting the protocol)
    when the run cap is reached with a strictly positive majority of
    1-outputs. All quantities come from the absorbing-walk analysis; no
    sampling is involved.
    """
    delta = Fraction(delta)
    if not 0 <= delta < Fraction(1, 2):
        raise InputError("delta must lie in [0, 1/2)")
    if cap is None:
        cap = max(2, 4 * max(1, math.ceil(math.log2(max(n, 2)))))
    zero_stats = _walk_stats(delta, cap)
    one_stats = _walk_stats(1 - delta, cap)
    reach = Fraction(1)
    e_zero = Fraction(0)
    e_one = Fraction(0)
    p_output_one = Fraction(0)
    for i in range(1, n + 1):
        is_one = (z >> (i - 1)) & 1
        st = one_stats if is_one else zero_stats
        if is_one:
            e_one += reach * st.expected_runs
        else:
            e_zero += reach * st.expected_runs
        p_output_one += reach * st.label_one_probability
        reach *= 1 - st.label_one_probability
    return ScheduleStats(
        n=n, z=z, delta=delta, cap=cap,
        expected_zero_invocations=e_zero,
        expected_one_invocations=e_one,
        detect_probability=one_stats.label_one_probability,
        false_positive_probability=zero_stats.label_one_probability,
        output_one_probability=p_output_one,
        per_gadget={"zero": zero_stats, "one": one_stats},
    )


# ---------------------------------------------------------------------------
# JSON protocol descriptions and handy constructions
# ---------------------------------------------------------------------------

def protocol_to_json(tree: ProtocolTree) -> dict:
    nodes = []
    for node in tree.nodes:
        if isinstance(node, ProtocolLeaf):
            if node.bob_output is not None:
                nodes.append({"leaf": True,
                              "bob_output": {_key_str(k): v
                                             for k, v in node.bob_output.items()}})
            else:
                nodes.append({"leaf": True, "output": node.output})
        else:
            nodes.append({"speaker": node.speaker,
                          "msg_table": {_key_str(k): v for k, v in node.msg.items()},
                          "children": list(node.children)})
    return {"nodes": nodes,
            "r_space": [[label, f"{p.numerator}/{p.denominator}"]
                        for label, p in tree.r_space]}


def protocol_from_json(d: dict) -> ProtocolTree:
    r_space = tuple((label, Fraction(p)) for label, p in
                    d.get("r_space", [["-", "1"]]))
    nodes = []
    for nd in d["nodes"]:
        if nd.get("leaf"):
            if "bob_output" in nd:
                nodes.append(ProtocolLeaf(bob_output={_key_parse(k): v
                                                      for k, v in nd["bob_output"].items()}))
            else:
                nodes.append(ProtocolLeaf(output=nd["output"]))
        else:
            nodes.append(ProtocolNode(speaker=nd["speaker"],
                                      msg={_key_parse(k): v
                                           for k, v in nd["msg_table"].items()},
                                      children=tuple(nd["children"])))
    return ProtocolTree(nodes=tuple(nodes), r_space=r_space)


def _key_str(key) -> str:
    inp, r = key
    return ",".join(str(v) for v in inp) + "|" + str(r)


def _key_parse(s: str):
    inp, r = s.rsplit("|", 1)
    return (tuple(int(v) for v in inp.split(",")), r)


def _all_tuples(base: int, n: int):
    return itertools.product(range(base), repeat=n)


def _value_string(f: BoolObject, gadget: Gadget, xs, ys) -> object:
    z = 0
    for j, (x, y) in enumerate(zip(xs, ys)):
        if gadget.value(x, y):
            z |= 1 << j
    rel = as_relation(f)
    return sorted(rel.valid[z])[0]


def _bits_needed(size: int) -> int:
    return max(1, (size - 1).bit_length())


def full_revelation_protocol(f: BoolObject, gadget: Gadget, pad: int = 0,
                             r_space=None) -> ProtocolTree:
    """The first party spells out their whole input bit by bit; the second
    party then knows the composed value and outputs it. Optional constant
    padding rounds inflate the communication cost without changing the
    computed function."""
    n = f.n
    bits = _bits_needed(gadget.x_size) * n + pad
    r_space = tuple(r_space) if r_space else (("-", Fraction(1)),)
    labels = [lbl for lbl, _ in r_space]
    xs_all = list(_all_tuples(gadget.x_size, n))
    ys_all = list(_all_tuples(gadget.y_size, n))
    nodes = []

    def encode_bits(xs) -> list:
        per = _bits_needed(gadget.x_size)
        out = []
        for x in xs:
            for b in range(per):
                out.append((x >> b) & 1)
        return out + [0] * pad

    # one internal node per transcript prefix, breadth-first
    order = [()]
    for prefix in order:
        if len(prefix) < bits:
            order.append(prefix + (0,))
            order.append(prefix + (1,))
    index_of = {p: i for i, p in enumerate(order)}
    for prefix in order:
        if len(prefix) < bits:
            msg = {}
            for xs in xs_all:
                bitstring = encode_bits(xs)
                for lbl in labels:
                    msg[(xs, lbl)] = bitstring[len(prefix)]
            nodes.append(ProtocolNode(speaker="A", msg=msg,
                                      children=(index_of[prefix + (0,)],
                                                index_of[prefix + (1,)])))
        else:
            per = _bits_needed(gadget.x_size)
            xs = tuple(sum(prefix[j * per + b] << b for b in range(per))
                       for j in range(n))
            valid_x = all(v < gadget.x_size for v in xs)
            bob = {}
            for ys in ys_all:
                for lbl in labels:
                    bob[(ys, lbl)] = _value_string(f, gadget, xs, ys) if valid_x else 0
            nodes.append(ProtocolLeaf(bob_output=bob))
    return ProtocolTree(nodes=tuple(nodes), r_space=r_space)


def reveal_and_answer_protocol(f: BoolObject, gadget: Gadget) -> ProtocolTree:
    """The second party spells out their input; the first party answers with
    the composed value as the final bit, which is also the output."""
    n = f.n
    per = _bits_needed(gadget.y_size)
    bits = per * n
    ys_all = list(_all_tuples(gadget.y_size, n))
    xs_all = list(_all_tuples(gadget.x_size, n))
    nodes = []
    order = [()]
    for prefix in order:
        if len(prefix) <= bits:
            order.append(prefix + (0,))
            order.append(prefix + (1,))
    order = [p for p in order if len(p) <= bits + 1]
    index_of = {p: i for i, p in enumerate(order)}

    def decode_ys(prefix):
        ys = tuple(sum(prefix[j * per + b] << b for b in range(per))
                   for j in range(n))
        return ys if all(v < gadget.y_size for v in ys) else None

    for prefix in order:
        if len(prefix) < bits:
            msg = {}
            for ys in ys_all:
                enc = []
                for y in ys:
                    for b in range(per):
                        enc.append((y >> b) & 1)
                msg[(ys, "-")] = enc[len(prefix)]
            nodes.append(ProtocolNode(speaker="B", msg=msg,
                                      children=(index_of[prefix + (0,)],
                                                index_of[prefix + (1,)])))
        elif len(prefix) == bits:
            ys = decode_ys(prefix)
            msg = {}
            for xs in xs_all:
                if ys is None:
                    msg[(xs, "-")] = 0
                else:
                    v = _value_string(f, gadget, xs, ys)
                    msg[(xs, "-")] = int(v) & 1
            nodes.append(ProtocolNode(speaker="A", msg=msg,
                                      children=(index_of[prefix + (0,)],
                                                index_of[prefix + (1,)])))
        else:
            nodes.append(ProtocolLeaf(output=prefix[-1]))
    return ProtocolTree(nodes=tuple(nodes))


def masked_revelation_protocol(f: BoolObject, gadget: Gadget) -> ProtocolTree:
    """Full revelation with the transcript one-time padded by two shared
    random labels; the receiver unmasks using the shared randomness."""
    n = f.n
    per = _bits_needed(gadget.x_size)
    bits = per * n
    r_space = (("r0", Fraction(1, 2)), ("r1", Fraction(1, 2)))
    mask = {"r0": 0, "r1": (1 << bits) - 1}
    xs_all = list(_all_tuples(gadget.x_size, n))
    ys_all = list(_all_tuples(gadget.y_size, n))
    order = [()]
    for prefix in order:
        if len(prefix) < bits:
            order.append(prefix + (0,))
            order.append(prefix + (1,))
    index_of = {p: i for i, p in enumerate(order)}
    nodes = []
    for prefix in order:
        if len(prefix) < bits:
            msg = {}
            for xs in xs_all:
                enc = []
                for x in xs:
                    for b in range(per):
                        enc.append((x >> b) & 1)
                for lbl in ("r0", "r1"):
                    m = (mask[lbl] >> len(prefix)) & 1
                    msg[(xs, lbl)] = enc[len(prefix)] ^ m
            nodes.append(ProtocolNode(speaker="A", msg=msg,
                                      children=(index_of[prefix + (0,)],
                                                index_of[prefix + (1,)])))
        else:
            bob = {}
            for lbl in ("r0", "r1"):
                unmasked = tuple(b ^ ((mask[lbl] >> i) & 1)
                                 for i, b in enumerate(prefix))
                xs = tuple(sum(unmasked[j * per + b] << b for b in range(per))
                           for j in range(n))
                valid_x = all(v < gadget.x_size for v in xs)
                for ys in ys_all:
                    bob[(ys, lbl)] = _value_string(f, gadget, xs, ys) if valid_x else 0
            nodes.append(ProtocolLeaf(bob_output=bob))
    return ProtocolTree(nodes=tuple(nodes), r_space=r_space)
