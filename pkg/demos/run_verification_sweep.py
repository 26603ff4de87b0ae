#!/usr/bin/env python3
"""A compact end-to-end verification sweep: every 2-bit partial function,
the full inequality suite, and a rendered summary."""

from advkit.corpus import CorpusSpec, verify_relations

report = verify_relations(CorpusSpec("partial", 2))
print(f"instances checked: {len(report.instances)}")
print(f"relations per instance: {len(report.relation_names)}")
print(f"violations: {len(report.failures)}")
print(f"solver resource errors: {len(report.errors)}")
print(f"config hash: {report.config_hash}")
print(f"wall time: {report.timing_seconds}s")
print()

by_relation = {}
for rec in report.instances:
    for row in rec["relations"]:
        by_relation.setdefault(row["relation"], 0)
        by_relation[row["relation"]] += 1
print("checks performed per relation:")
for name, count in sorted(by_relation.items()):
    print(f"  {name:<28}{count:>5}")

tightest = None
for rec in report.instances:
    for row in rec["relations"]:
        if row["relation"] == "cfbs_le_2cadv" and "/" in str(row["slack"]):
            tightest = (rec["instance"], row["slack"])
print()
if tightest:
    print(f"a fractional-slack instance for the doubling bound: {tightest[0]}"
          f" (slack {tightest[1]})")
assert report.all_passed
print("sweep passed")
