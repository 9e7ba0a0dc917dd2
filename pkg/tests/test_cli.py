import json
import subprocess
import sys
from pathlib import Path

import pytest

from flexcolor import __version__
from flexcolor.cli import run
from flexcolor.witnesses import catalog_hash

FIXTURES = Path(__file__).parent / "fixtures"
CASES = json.loads((FIXTURES / "cases.json").read_text(encoding="utf-8"))


def _argv(case):
    return [a.replace("{fx}", str(FIXTURES)) for a in case["argv"]]


def test_corpus_size():
    files = [p for p in FIXTURES.iterdir() if p.name != "cases.json"]
    assert len(files) >= 20


@pytest.mark.parametrize("case", CASES, ids=[" ".join(c["argv"][:3]).replace("{fx}/", "") for c in CASES])
def test_golden_exit_codes(case):
    code, out = run(_argv(case))
    assert code == case["exit"], out
    if "expect" in case:
        doc = json.loads(out)
        for key, value in case["expect"].items():
            assert doc[key] == value, key


def test_reports_embed_provenance_fields():
    code, out = run(["maxsat", "--instance", str(FIXTURES / "k2n_t2_n3.json"), "--seed", "9"])
    doc = json.loads(out)
    assert code == 0
    assert doc["tool"] == "flexcolor" and doc["version"] == __version__
    assert doc["seed"] == 9 and doc["catalog_sha256"] == catalog_hash()
    assert "ms" not in doc


def test_witness_out(tmp_path):
    path = tmp_path / "cex.json"
    code, _ = run(["choosable", "--sizes", "3,7", "--list-sizes", "3,2", "--witness-out", str(path)])
    assert code == 1
    code, out = run(["maxsat", "--instance", str(path)])
    assert code == 1 and json.loads(out)["status"] == "NotColorable"


def test_hall_text():
    assert run(["hall", "--sizes", "1,1,1"]) == (0, "3/1\nbrute_force_agrees: True\n")


def test_construct_cross_checks():
    from flexcolor.exactsolve import max_satisfied
    from flexcolor.graphcore import load_instance

    for name, algo in [("k23_3lists_full.json", "thm1"), ("k44_4lists_full.json", "knn")]:
        code, out = run(["construct", "--instance", str(FIXTURES / name), "--algorithm", algo])
        doc = json.loads(out)
        inst = load_instance(FIXTURES / name)
        best = max_satisfied(inst.graph, inst.lists, inst.request).best
        assert code == 0 and doc["guarantee"] <= doc["satisfied"] <= best


def test_csv_and_text_formats():
    code, out = run(["reproduce", "--result", "k2n", "--format", "csv"])
    assert code == 0 and out.splitlines()[0].startswith("case,") and out.count("\n") == 5
    code, out = run(["verify", "--format", "text"])
    assert code == 0 and "tool: flexcolor" in out


@pytest.mark.parametrize("result", ["thm-3-2", "k2n", "witnesses"])
def test_reproduce_is_deterministic(result, monkeypatch):
    first = run(["reproduce", "--result", result, "--format", "json"])
    again = run(["reproduce", "--result", result, "--format", "json", "--workers", "2"])
    monkeypatch.setenv("FLEXCOLOR_WORKERS", "3")
    env = run(["reproduce", "--result", result, "--format", "json"])
    assert first == again == env
    assert first[0] == 0


def test_bad_worker_env(monkeypatch):
    monkeypatch.setenv("FLEXCOLOR_WORKERS", "many")
    code, _ = run(["choosable", "--sizes", "2,3", "--list-sizes", "2,2"])
    assert code == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "flexcolor.cli", "hall", "--sizes", "3,7"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("2/1")
