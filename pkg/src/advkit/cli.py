"""Command-line interface: measure, gadget, lift, verify, report.

Flags can also be supplied through a key=value config file (--config) and
the ADVKIT_JOBS environment variable as a fallback for --jobs. Exit codes:
0 all checks passed, 1 a relation was violated, 2 resource or configuration
error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .boolfn import parse_object, PartialFn
from .corpus import CorpusSpec, VerificationReport, verify_relations
from .errors import AdvkitError, ResourceError
from .exactmath import frac_str, parse_frac
from .measures import (adv, adv1, approx_deg_witness, bs, cadv, cbs, cfbs,
                       exact_deg_witness, fbs)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_RESOURCE = 2


def _load_config(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise AdvkitError(f"malformed config line: {line!r}")
            key, val = line.split("=", 1)
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _merged(args, config):
    """Apply config-file values behind explicit flags, env behind both."""
    for key, val in config.items():
        if getattr(args, key, None) in (None, False):
            setattr(args, key, val)
    if getattr(args, "jobs", None) in (None, 0):
        args.jobs = int(os.environ.get("ADVKIT_JOBS", "1"))
    else:
        args.jobs = int(args.jobs)
    return args


def _emit(payload: dict, out_path):
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_measure(args) -> int:
    with open(args.fn) as fh:
        line = fh.read().strip()
    obj = parse_object(line)
    kind = args.kind
    if kind in ("bs", "fbs", "deg", "adeg") and not isinstance(obj, PartialFn):
        raise AdvkitError(f"measure {kind!r} is defined for functions, not relations")
    eps = parse_frac(args.eps) if args.eps else Fraction(1, 3)
    started = time.time()
    witness = None
    if kind == "bs":
        value = Fraction(bs(obj))
    elif kind == "fbs":
        value = fbs(obj)
    elif kind == "cbs":
        value = Fraction(cbs(obj))
    elif kind == "cfbs":
        value = cfbs(obj)
    elif kind == "cadv":
        res = cadv(obj)
        value = res.value
        witness = {f"{x},{i}": frac_str(v) for (x, i), v in sorted(res.scheme.q.items()) if v}
        if args.dump_lp:
            from .measures import cadv_full_lp
            from .optim import lp_to_text
            dump_path = (args.out or args.fn) + ".lp"
            with open(dump_path, "w") as fh:
                fh.write(lp_to_text(cadv_full_lp(obj)) + "\n")
    elif kind in ("adv", "adv1"):
        res = (adv if kind == "adv" else adv1)(obj)
        record = {
            "measure": kind,
            "value": {"lower": frac_str(res.lower), "upper": frac_str(res.upper),
                      "decimal": (float(res.lower) + float(res.upper)) / 2},
            "gap_met": res.gap_met,
            "witness": {f"{x},{i}": frac_str(v)
                        for (x, i), v in sorted(res.witness_primal.q.items()) if v},
            "timing": round(time.time() - started, 4),
        }
        _emit(record, args.out)
        return EXIT_OK
    elif kind == "deg":
        res = exact_deg_witness(obj)
        value = Fraction(res.degree)
        witness = res.witness.to_json_dict()
    elif kind == "adeg":
        res = approx_deg_witness(obj, eps)
        value = Fraction(res.degree)
        witness = res.witness.to_json_dict()
    else:
        raise AdvkitError(f"unknown measure kind {kind!r}")
    record = {
        "measure": kind,
        "value": {"exact": frac_str(value), "decimal": float(value)},
        "witness": witness,
        "timing": round(time.time() - started, 4),
    }
    _emit(record, args.out)
    return EXIT_OK


def cmd_gadget(args) -> int:
    from .gadgets import parity_family, ver, versatility_report
    if args.n and int(args.n) > 1:
        fam = parity_family(int(args.n))
        payload = {
            "family_index": fam.n,
            "gadget": fam.gadget.to_json_dict(),
            "flip": {"sigma_a": list(fam.flip[0]), "sigma_b": list(fam.flip[1])},
            "self_reduction_support": len(fam.reduction.support),
            "and_embedding": fam.and_embedding,
            "versatile": True,
        }
    else:
        payload = versatility_report(ver())
    _emit(payload, args.out)
    return EXIT_OK


def cmd_lift(args) -> int:
    from .gadgets import ver
    from .liftsim import (lift_weight_scheme, min_pair_bound, noisy_or_schedule,
                          protocol_from_json)
    if args.schedule:
        from .boolfn import parse_input
        n = int(args.n) if args.n else len(args.schedule)
        delta = parse_frac(args.eps) if args.eps else Fraction(1, 4)
        z = parse_input(args.schedule)
        stats = noisy_or_schedule(n, z, delta)
        _emit(stats.to_json_dict(), args.out)
        return EXIT_OK
    with open(args.fn) as fh:
        obj = parse_object(fh.read().strip())
    with open(args.protocol) as fh:
        tree = protocol_from_json(json.load(fh))
    g = ver()
    payload = {"cc": tree.cc(), "schemes": {}}
    for z in range(1 << obj.n):
        sch = lift_weight_scheme(tree, obj, g, z)
        payload["schemes"][format(z, f"0{obj.n}b")[::-1]] = {
            "weights": [float(w) for w in sch.weights],
            "sum": float(sch.total),
        }
    from .boolfn import as_relation
    rel = as_relation(obj)
    pairs = []
    for z in range(1 << obj.n):
        for w in range(z + 1, 1 << obj.n):
            if not (rel.valid[z] & rel.valid[w]):
                res = min_pair_bound(tree, obj, g, z, w)
                pairs.append({"z": z, "w": w, "value": float(res.value),
                              "block1": list(res.block1),
                              "hybrid": res.hybrid})
    payload["min_pairs"] = pairs
    _emit(payload, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    sample = None
    if args.sample:
        if "," in args.sample:
            count, seed = args.sample.split(",")
        else:
            count, seed = args.sample, (args.seed or "0")
        sample = (int(count), int(seed))
    spec = CorpusSpec(kind=args.kind or "total", n=int(args.n or 2),
                      sample=sample,
                      sigma_size=int(args.sigma or 2))
    try:
        report = verify_relations(spec, jobs=args.jobs)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    payload = report.canonical_dict(include_timing=not args.deterministic)
    fmt = args.format or "json"
    _write_report(payload, fmt, args.out)
    if report.errors:
        for err in report.errors:
            print(f"instance {err['index']}: {err['error']}", file=sys.stderr)
    return EXIT_OK if report.all_passed else EXIT_VIOLATION


def cmd_report(args) -> int:
    with open(args.fn) as fh:
        payload = json.load(fh)
    _write_report(payload, args.format or "markdown", args.out)
    return EXIT_OK


def _write_report(payload: dict, fmt: str, out_path):
    if fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=True)
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["index", "instance", "measure", "exact", "decimal"])
        for rec in payload.get("instances", []):
            for measure, val in sorted(rec.get("values", {}).items()):
                writer.writerow([rec["index"], rec["instance"], measure,
                                 val["exact"], val["decimal"]])
        text = buf.getvalue()
    elif fmt == "markdown":
        lines = ["| index | instance | failures | gap_met |",
                 "| --- | --- | --- | --- |"]
        fails_by_index = {}
        for f in payload.get("failures", []):
            fails_by_index.setdefault(f["index"], []).append(f["relation"])
        for rec in sorted(payload.get("instances", []), key=lambda r: r["index"]):
            fl = ",".join(fails_by_index.get(rec["index"], [])) or "-"
            lines.append(f"| {rec['index']} | `{rec['instance']}` | {fl} "
                         f"| {rec.get('gap_met', True)} |")
        text = "\n".join(lines) + "\n"
    else:
        raise AdvkitError(f"unknown report format {fmt!r}")
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="advkit",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--fn", help="truth-table or relation file")
        p.add_argument("--kind", help="measure kind / corpus kind")
        p.add_argument("--eps", help="error parameter as p/q")
        p.add_argument("--n", help="arity")
        p.add_argument("--seed", help="sample seed")
        p.add_argument("--jobs", help="parallel workers (env ADVKIT_JOBS)")
        p.add_argument("--out", help="output path (stdout otherwise)")
        p.add_argument("--format", help="report format: json|csv|markdown")
        p.add_argument("--config", help="key=value config file")

    p_measure = sub.add_parser("measure", help="compute one measure for one instance")
    common(p_measure)
    p_measure.add_argument("--dump-lp", action="store_true",
                           help="dump LPs in interchange format where retained")
    p_measure.set_defaults(func=cmd_measure)

    p_gadget = sub.add_parser("gadget", help="emit a versatility report")
    common(p_gadget)
    p_gadget.set_defaults(func=cmd_gadget)

    p_lift = sub.add_parser("lift", help="lifting analysis or the OR scheduler")
    common(p_lift)
    p_lift.add_argument("--protocol", help="protocol JSON file")
    p_lift.add_argument("--schedule", help="bit string for the OR scheduler")
    p_lift.set_defaults(func=cmd_lift)

    p_verify = sub.add_parser("verify", help="run the relation suite over a corpus")
    common(p_verify)
    p_verify.add_argument("--sample", help="count,seed for sampled corpora")
    p_verify.add_argument("--sigma", help="alphabet size for relation corpora")
    p_verify.add_argument("--deterministic", action="store_true",
                          help="omit wall-clock timing for byte-reproducibility")
    p_verify.set_defaults(func=cmd_verify)

    p_report = sub.add_parser("report", help="re-render a verification report")
    common(p_report)
    p_report.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _load_config(args.config) if getattr(args, "config", None) else {}
    try:
        args = _merged(args, config)
        return args.func(args)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except AdvkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
