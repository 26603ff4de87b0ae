import json
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from advkit.cli import main
from advkit.corpus import (CorpusSpec, corpus_size, enumerate_corpus,
                           verify_relations)
from advkit.errors import ResourceError


def test_corpus_counts():
    assert sum(1 for _ in enumerate_corpus(CorpusSpec("total", 2))) == 16
    assert sum(1 for _ in enumerate_corpus(CorpusSpec("partial", 2))) == 80
    assert corpus_size(CorpusSpec("total", 3)) == 256


def test_sample_determinism():
    spec = CorpusSpec("partial", 3, sample=(50, 7))
    a = [o.to_text() for o in enumerate_corpus(spec)]
    b = [o.to_text() for o in enumerate_corpus(spec)]
    assert a == b and len(a) == 50


def test_exhaustive_cap():
    with pytest.raises(ResourceError):
        list(enumerate_corpus(CorpusSpec("total", 5)))


def test_relation_corpus():
    spec = CorpusSpec("relation", 1, sigma_size=2)
    rels = list(enumerate_corpus(spec))
    assert len(rels) == 9  # 3 nonempty subsets per input, squared


def test_verify_small_sweep_passes_and_reproduces():
    rep1 = verify_relations(CorpusSpec("total", 2))
    assert rep1.all_passed
    assert len(rep1.instances) == 16
    rep2 = verify_relations(CorpusSpec("total", 2))
    assert rep1.canonical_bytes() == rep2.canonical_bytes()


def test_verify_corrupted_measure_fails_with_witness():
    rep = verify_relations(CorpusSpec("total", 2), overrides={"cadv": F(1000)})
    assert not rep.all_passed
    assert rep.failures[0]["instance"].startswith("n=2;table=")


def test_verify_empty_corpus_trivially_passes():
    rep = verify_relations(CorpusSpec("total", 1, sample=(0, 1)))
    assert rep.all_passed and rep.instances == []


def _run_cli(args):
    return main(args)


def test_cli_measure(tmp_path, capsys):
    fn = tmp_path / "f.tt"
    fn.write_text("n=2;table=0,0,0,1\n")
    code = _run_cli(["measure", "--kind", "cadv", "--fn", str(fn)])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["value"]["exact"] == "2"


def test_cli_measure_adeg(tmp_path, capsys):
    fn = tmp_path / "f.tt"
    fn.write_text("n=2;table=0,1,1,0\n")
    code = _run_cli(["measure", "--kind", "adeg", "--eps", "1/3", "--fn", str(fn)])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["value"]["exact"] == "2"


def test_cli_gadget(capsys):
    assert _run_cli(["gadget"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["versatile"] and rep["flip"]["sigma_a"] == [2, 3, 0, 1]


def test_cli_schedule(capsys):
    assert _run_cli(["lift", "--schedule", "0100", "--eps", "1/4"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["n"] == 4 and rep["z"] == "0100"


def test_cli_verify_exit_codes(tmp_path):
    out = tmp_path / "rep.json"
    code = _run_cli(["verify", "--kind", "total", "--n", "2",
                     "--out", str(out), "--deterministic"])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["failures"] == []
    assert "timing_seconds" not in payload


def test_cli_report_formats(tmp_path, capsys):
    rep_path = tmp_path / "rep.json"
    _run_cli(["verify", "--kind", "total", "--n", "1", "--out", str(rep_path),
              "--deterministic"])
    assert _run_cli(["report", "--fn", str(rep_path), "--format", "csv"]) == 0
    csv_text = capsys.readouterr().out
    header, *rows = [r for r in csv_text.splitlines() if r]
    assert header.split(",")[:3] == ["index", "instance", "measure"]
    payload = json.loads(rep_path.read_text())
    per_instance = len(payload["instances"][0]["values"])
    assert len(rows) == len(payload["instances"]) * per_instance
    assert _run_cli(["report", "--fn", str(rep_path), "--format", "markdown"]) == 0
    md = capsys.readouterr().out
    assert md.startswith("| index |")


def test_cli_config_file_and_env(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "advkit.cfg"
    cfg.write_text("kind=cadv\n")
    fn = tmp_path / "f.tt"
    fn.write_text("n=1;table=0,1\n")
    code = _run_cli(["measure", "--fn", str(fn), "--config", str(cfg)])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["measure"] == "cadv"
    monkeypatch.setenv("ADVKIT_JOBS", "1")
    code = _run_cli(["verify", "--kind", "total", "--n", "1",
                     "--out", str(tmp_path / "r.json")])
    assert code == 0


def test_cli_entrypoint_subprocess(tmp_path):
    fn = tmp_path / "f.tt"
    fn.write_text("n=1;table=0,1\n")
    proc = subprocess.run([sys.executable, "-m", "advkit.cli", "measure",
                           "--kind", "bs", "--fn", str(fn)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"]["exact"] == "1"


def test_dedup_isomorphic():
    # 2-bit totals collapse from 16 tables to 6 classes under bit
    # permutation and input negation
    spec = CorpusSpec("total", 2, dedup_isomorphic=True)
    classes = list(enumerate_corpus(spec))
    assert len(classes) == 6
    with pytest.raises(ResourceError):
        list(enumerate_corpus(CorpusSpec("relation", 1, dedup_isomorphic=True)))


def test_cli_resource_exit_code(tmp_path):
    code = _run_cli(["verify", "--kind", "total", "--n", "5",
                     "--out", str(tmp_path / "r.json")])
    assert code == 2


def test_cli_seed_flag(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        code = _run_cli(["verify", "--kind", "partial", "--n", "2",
                         "--sample", "5", "--seed", "42", "--out", str(out),
                         "--deterministic"])
        assert code == 0
    assert a.read_text() == b.read_text()


def test_cli_dump_lp(tmp_path, capsys):
    fn = tmp_path / "f.tt"
    fn.write_text("n=2;table=0,0,0,1\n")
    out = tmp_path / "res.json"
    code = _run_cli(["measure", "--kind", "cadv", "--fn", str(fn),
                     "--out", str(out), "--dump-lp"])
    assert code == 0
    dump = (tmp_path / "res.json.lp").read_text()
    assert dump.startswith("Minimize") and "Subject To" in dump


def test_cli_lift_protocol(tmp_path, capsys):
    from advkit.boolfn import identity_fn
    from advkit.gadgets import ver
    from advkit.liftsim import full_revelation_protocol, protocol_to_json
    proto = tmp_path / "p.json"
    proto.write_text(json.dumps(protocol_to_json(
        full_revelation_protocol(identity_fn(), ver()))))
    fn = tmp_path / "f.tt"
    fn.write_text("n=1;table=0,1\n")
    code = _run_cli(["lift", "--fn", str(fn), "--protocol", str(proto)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["cc"] == 2
    assert payload["min_pairs"][0]["value"] > 0
