"""Corpus enumeration and the relation-verification engine.

A corpus is a deterministic stream of small Boolean functions or
relations (exhaustive where the count permits, seeded-random otherwise).
The verifier computes the full measure bundle per instance, evaluates
every applicable inequality from the relation suite, runs the
construction round-trips, and assembles a reproducible report.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

import mpmath

from . import __version__
from .boolfn import (BoolObject, PartialFn, Relation, critical_inputs, to_relation)
from .conversions import adv_to_cadv_scheme, cadv_to_cfbs_witness, check_feasible
from .errors import AdvkitError, ResourceError
from .exactmath import frac_str
from .measures import (adv, adv1, approx_deg, bs, cadv, cbs, cfbs, fbs)

EXHAUSTIVE_CAP = 10 ** 6
ADV_TOL = Fraction(1, 1000)


@dataclass(frozen=True)
class CorpusSpec:
    kind: str                      # 'total' | 'partial' | 'relation'
    n: int
    sample: Optional[tuple] = None  # (count, seed)
    sigma_size: int = 2
    drop_constants: bool = False
    dedup_isomorphic: bool = False  # quotient by bit permutation and negation

    def describe(self) -> dict:
        return {"kind": self.kind, "n": self.n,
                "sample": list(self.sample) if self.sample else None,
                "sigma_size": self.sigma_size,
                "drop_constants": self.drop_constants,
                "dedup_isomorphic": self.dedup_isomorphic}


def _is_constant(obj: BoolObject) -> bool:
    if isinstance(obj, PartialFn):
        vals = {v for v in obj.table if v is not None}
        return len(vals) <= 1
    first = obj.valid[0]
    return all(v == first for v in obj.valid)


def corpus_size(spec: CorpusSpec) -> int:
    if spec.sample:
        return spec.sample[0]
    if spec.kind == "total":
        return 2 ** (1 << spec.n)
    if spec.kind == "partial":
        return 3 ** (1 << spec.n) - 1
    return (2 ** spec.sigma_size - 1) ** (1 << spec.n)


def _canonical_table(table: tuple, n: int) -> tuple:
    """Least table over all input-bit permutations and negation masks.

    The measured relations are invariant under these symmetries, so
    quotienting is sound when deduplication is requested.
    """
    import itertools as it
    best = None
    points = 1 << n
    for perm in it.permutations(range(n)):
        for mask in range(points):
            cand = [None] * points
            for x in range(points):
                y = 0
                for i in range(n):
                    if ((x ^ mask) >> i) & 1:
                        y |= 1 << perm[i]
                cand[y] = table[x]
            key = tuple(-1 if v is None else v for v in cand)
            if best is None or key < best[0]:
                best = (key, tuple(cand))
    return best[1]


def enumerate_corpus(spec: CorpusSpec) -> Iterator[BoolObject]:
    """Deterministic instance stream; exhaustive streams must fit the cap."""
    if spec.sample is None and corpus_size(spec) > EXHAUSTIVE_CAP:
        raise ResourceError(
            f"{corpus_size(spec)} instances exceed the exhaustive cap "
            f"{EXHAUSTIVE_CAP}; request a (count, seed) sample instead")
    if spec.dedup_isomorphic:
        if spec.kind == "relation":
            raise ResourceError("isomorphism deduplication covers function corpora only")
        seen = set()
        base = CorpusSpec(kind=spec.kind, n=spec.n, sample=spec.sample,
                          sigma_size=spec.sigma_size,
                          drop_constants=spec.drop_constants)
        for obj in enumerate_corpus(base):
            canon = _canonical_table(obj.table, obj.n)
            if canon in seen:
                continue
            seen.add(canon)
            yield obj
        return
    points = 1 << spec.n
    if spec.sample is None:
        if spec.kind == "total":
            for code in range(2 ** points):
                table = tuple((code >> x) & 1 for x in range(points))
                f = PartialFn(n=spec.n, table=table)
                if spec.drop_constants and _is_constant(f):
                    continue
                yield f
        elif spec.kind == "partial":
            for code in range(3 ** points):
                table = []
                c = code
                for _ in range(points):
                    trit = c % 3
                    c //= 3
                    table.append(None if trit == 2 else trit)
                if all(v is None for v in table):
                    continue
                f = PartialFn(n=spec.n, table=tuple(table))
                if spec.drop_constants and _is_constant(f):
                    continue
                yield f
        else:
            sigma = tuple(range(spec.sigma_size))
            subsets = [frozenset(s for s in sigma if (m >> s) & 1)
                       for m in range(1, 1 << spec.sigma_size)]
            def rec(prefix):
                if len(prefix) == points:
                    yield Relation(n=spec.n, sigma=sigma, valid=tuple(prefix))
                    return
                for s in subsets:
                    yield from rec(prefix + [s])
            for rel in rec([]):
                if spec.drop_constants and _is_constant(rel):
                    continue
                yield rel
        return
    count, seed = spec.sample
    rng = random.Random(seed)
    produced = 0
    while produced < count:
        if spec.kind == "total":
            table = tuple(rng.randint(0, 1) for _ in range(points))
            obj = PartialFn(n=spec.n, table=table)
        elif spec.kind == "partial":
            table = tuple(rng.choice((0, 1, None)) for _ in range(points))
            if all(v is None for v in table):
                continue
            obj = PartialFn(n=spec.n, table=table)
        else:
            sigma = tuple(range(spec.sigma_size))
            valid = []
            for _ in range(points):
                mask = rng.randrange(1, 1 << spec.sigma_size)
                valid.append(frozenset(s for s in sigma if (mask >> s) & 1))
            obj = Relation(n=spec.n, sigma=sigma, valid=tuple(valid))
        if spec.drop_constants and _is_constant(obj):
            continue
        produced += 1
        yield obj


# ---------------------------------------------------------------------------
# Measure bundle and the relation suite
# ---------------------------------------------------------------------------

def measure_bundle(obj: BoolObject, adeg_eps=(Fraction(1, 3),),
                   overrides: Optional[dict] = None) -> dict:
    """All measures for one instance; overrides replace named entries
    (a test hook for harness self-checks)."""
    out = {}
    is_partial = isinstance(obj, PartialFn)
    if is_partial:
        out["bs"] = Fraction(bs(obj))
        out["fbs"] = fbs(obj)
    out["cbs"] = Fraction(cbs(obj))
    out["cfbs"] = cfbs(obj)
    cres = cadv(obj)
    out["cadv"] = cres.value
    out["cadv_scheme"] = cres.scheme
    ares = adv(obj)
    out["adv_lower"], out["adv_upper"] = ares.lower, ares.upper
    out["adv_scheme"] = ares.witness_primal
    out["adv_gap_met"] = ares.gap_met
    a1res = adv1(obj)
    out["adv1_lower"], out["adv1_upper"] = a1res.lower, a1res.upper
    out["adv1_gap_met"] = a1res.gap_met
    if is_partial:
        for eps in adeg_eps:
            out[f"adeg_{eps.numerator}_{eps.denominator}"] = Fraction(
                approx_deg(obj, eps))
    if overrides:
        out.update(overrides)
    return out


def _adeg_cadv_ok(adeg_value: Fraction, cadv_value: Fraction,
                  eps: Fraction) -> bool:
    """Decide adeg >= sqrt((1-2 eps) cadv)/pi - 1, rigorously.

    Equivalent to (adeg+1)^2 pi^2 >= (1-2 eps) cadv; pi^2 is irrational,
    so escalating intervals always separate the sides (the right side is
    rational and equality cannot occur unless both sides vanish).
    """
    lhs_sq = (adeg_value + 1) ** 2
    rhs = (1 - 2 * eps) * cadv_value
    if rhs <= 0:
        return True
    old = mpmath.iv.prec
    try:
        prec = 64
        while prec <= 4096:
            mpmath.iv.prec = prec
            lhs = mpmath.iv.mpf(lhs_sq.numerator) / mpmath.iv.mpf(lhs_sq.denominator)
            lhs *= mpmath.iv.pi ** 2
            rhs_iv = mpmath.iv.mpf(rhs.numerator) / mpmath.iv.mpf(rhs.denominator)
            if lhs > rhs_iv:
                return True
            if lhs < rhs_iv:
                return False
            prec *= 2
    finally:
        mpmath.iv.prec = old
    raise AdvkitError("degree inequality unresolved")


RELATION_SUITE = (
    # name, applies_to, tolerance tag
    ("bs_le_fbs", "partial", "exact"),
    ("fbs_le_cfbs", "partial", "exact"),
    ("bs_le_cbs", "partial", "exact"),
    ("cbs_le_cfbs", "any", "exact"),
    ("cbs_eq_bs_total", "total", "exact"),
    ("cadv_le_cfbs", "partial", "exact"),
    ("cfbs_le_2cadv", "partial", "exact"),
    ("adv_lower_le_cadv", "any", "adv_sandwich"),
    ("cadv_le_2adv_sq", "any", "exact"),
    ("adv1_le_adv", "any", "adv_sandwich"),
    ("adeg_ge_sqrt_cadv", "partial", "integer_slack"),
    ("conversion_cadv_to_cfbs", "partial", "exact"),
    ("conversion_adv_to_cadv", "any", "exact"),
)

TOLERANCES = {"exact": Fraction(0), "adv_sandwich": ADV_TOL,
              "integer_slack": Fraction(1)}


def evaluate_relations(obj: BoolObject, bundle: dict,
                       suite=RELATION_SUITE) -> list:
    """Evaluate each applicable relation; returns (name, ok, slack) rows.

    Slack is how much room the inequality has (negative means violated);
    reported as a string of the exact rational where available.
    """
    is_partial = isinstance(obj, PartialFn)
    is_total = is_partial and obj.is_total()
    rows = []
    for name, applies, tol in suite:
        if applies == "partial" and not is_partial:
            continue
        if applies == "total" and not is_total:
            continue
        ok, slack = _evaluate_one(name, obj, bundle)
        rows.append({"relation": name, "ok": ok, "slack": slack,
                     "tolerance": tol})
    return rows


def _evaluate_one(name: str, obj: BoolObject, b: dict):
    def gap(x):
        return frac_str(Fraction(x))

    if name == "bs_le_fbs":
        d = b["fbs"] - b["bs"]
        return d >= 0, gap(d)
    if name == "fbs_le_cfbs":
        d = b["cfbs"] - b["fbs"]
        return d >= 0, gap(d)
    if name == "bs_le_cbs":
        d = b["cbs"] - b["bs"]
        return d >= 0, gap(d)
    if name == "cbs_le_cfbs":
        d = b["cfbs"] - b["cbs"]
        return d >= 0, gap(d)
    if name == "cbs_eq_bs_total":
        d = b["cbs"] - b["bs"]
        return d == 0, gap(d)
    if name == "cadv_le_cfbs":
        d = b["cfbs"] - b["cadv"]
        return d >= 0, gap(d)
    if name == "cfbs_le_2cadv":
        d = 2 * b["cadv"] - b["cfbs"]
        return d >= 0, gap(d)
    if name == "adv_lower_le_cadv":
        d = b["cadv"] - (b["adv_lower"] - ADV_TOL)
        return d >= 0, gap(d)
    if name == "cadv_le_2adv_sq":
        d = 2 * b["adv_upper"] ** 2 - b["cadv"]
        return d >= 0, gap(d)
    if name == "adv1_le_adv":
        d = b["adv_upper"] + ADV_TOL - b["adv1_upper"]
        return d >= 0, gap(d)
    if name == "adeg_ge_sqrt_cadv":
        ok = _adeg_cadv_ok(b["adeg_1_3"], b["cadv"], Fraction(1, 3))
        return ok, "interval-checked"
    if name == "conversion_cadv_to_cfbs":
        try:
            completion, covers = cadv_to_cfbs_witness(obj, b["cadv_scheme"])
        except AdvkitError as exc:
            return False, str(exc)
        worst = max((sum(c.values()) for c in covers.values()), default=Fraction(0))
        d = 2 * b["cadv"] - worst
        return d >= 0, gap(d)
    if name == "conversion_adv_to_cadv":
        try:
            scheme = adv_to_cadv_scheme(obj, b["adv_scheme"], b["adv_upper"])
        except AdvkitError as exc:
            return False, str(exc)
        ok = check_feasible(obj, scheme) is None
        d = 2 * b["adv_upper"] ** 2 - scheme.objective()
        return ok and d >= 0, gap(d)
    raise AdvkitError(f"unknown relation {name}")


# ---------------------------------------------------------------------------
# Verification report
# ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    corpus: dict
    relation_names: list
    instances: list = field(default_factory=list)   # per-instance dicts
    failures: list = field(default_factory=list)
    errors: list = field(default_factory=list)      # resource errors, not fatal
    timing_seconds: float = 0.0
    toolkit_version: str = __version__
    config_hash: str = ""

    @property
    def all_passed(self) -> bool:
        return not self.failures

    def canonical_dict(self, include_timing: bool = False) -> dict:
        d = {
            "corpus": self.corpus,
            "relation_names": self.relation_names,
            "instances": self.instances,
            "failures": self.failures,
            "errors": self.errors,
            "toolkit_version": self.toolkit_version,
            "config_hash": self.config_hash,
        }
        if include_timing:
            d["timing_seconds"] = self.timing_seconds
        return d

    def canonical_bytes(self) -> bytes:
        """Byte-reproducible serialization (timing excluded by design)."""
        return json.dumps(self.canonical_dict(), sort_keys=True,
                          separators=(",", ":")).encode()


def config_hash(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def _decimal(x: Fraction) -> float:
    return float(Fraction(x))


def instance_record(index: int, obj: BoolObject, bundle: dict,
                    relation_rows: list) -> dict:
    values = {}
    for key, val in bundle.items():
        if isinstance(val, Fraction):
            values[key] = {"exact": frac_str(val), "decimal": _decimal(val)}
    scheme = bundle.get("cadv_scheme")
    witness = None
    if scheme is not None:
        witness = {f"{x},{i}": frac_str(v) for (x, i), v in sorted(scheme.q.items())
                   if v}
    return {
        "index": index,
        "instance": obj.to_text(),
        "kind": "relation" if isinstance(obj, Relation) else
                ("total" if obj.is_total() else "partial"),
        "values": values,
        "relations": relation_rows,
        "witnesses": {"cadv_scheme": witness},
        "gap_met": bool(bundle.get("adv_gap_met", True) and
                        bundle.get("adv1_gap_met", True)),
    }


def verify_relations(spec: CorpusSpec, suite=RELATION_SUITE,
                     tolerances=None, jobs: int = 1,
                     overrides: Optional[dict] = None,
                     adeg_eps=(Fraction(1, 3),)) -> VerificationReport:
    """Run the relation suite over a corpus and assemble the report.

    Solver resource errors are recorded per instance rather than aborting
    the sweep. The report is byte-reproducible for a fixed (corpus spec,
    seed, config hash); wall-clock timing lives outside the canonical
    payload.
    """
    tolerances = tolerances or TOLERANCES
    started = time.time()
    cfg = {"corpus": spec.describe(),
           "suite": [name for name, _, _ in suite],
           "tolerances": {k: frac_str(v) for k, v in tolerances.items()},
           "version": __version__}
    report = VerificationReport(corpus=spec.describe(),
                                relation_names=[name for name, _, _ in suite],
                                config_hash=config_hash(cfg))
    items = list(enumerate(enumerate_corpus(spec)))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_worker, [(i, obj.to_text(), overrides,
                                               tuple(adeg_eps))
                                              for i, obj in items]))
    else:
        results = [_worker((i, obj.to_text(), overrides, tuple(adeg_eps)))
                   for i, obj in items]
    for (index, obj), outcome in zip(items, results):
        status, payload = outcome
        if status == "error":
            report.errors.append({"index": index, "instance": obj.to_text(),
                                  "error": payload})
            continue
        record = payload
        report.instances.append(record)
        for row in record["relations"]:
            if not row["ok"]:
                report.failures.append({"index": index,
                                        "instance": obj.to_text(),
                                        "relation": row["relation"],
                                        "slack": row["slack"]})
    report.timing_seconds = round(time.time() - started, 3)
    return report


def _worker(args):
    index, text, overrides, adeg_eps = args
    from .boolfn import parse_object
    obj = parse_object(text)
    try:
        bundle = measure_bundle(obj, adeg_eps=adeg_eps, overrides=overrides)
        rows = evaluate_relations(obj, bundle)
        return ("ok", instance_record(index, obj, bundle, rows))
    except ResourceError as exc:
        return ("error", str(exc))
