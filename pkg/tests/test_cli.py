import json
import subprocess
import sys

import pytest

from cvan import SCHEMA_VERSION
from cvan.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    doc = json.loads(out)
    assert doc["schema"] == SCHEMA_VERSION
    return code, doc


def test_audit_all(capsys):
    code, doc = run_json(capsys, "audit", "degrees", "--all")
    assert code == 0 and doc["ok"]
    assert len(doc["reports"]) >= 26


def test_audit_family(capsys):
    code, doc = run_json(capsys, "audit", "degrees", "--family", "u3")
    assert code == 0 and doc["reports"][0]["family"] == "u3"


def test_enumerate_u3_q5(capsys):
    code, doc = run_json(capsys, "enumerate", "--family", "u3", "--q", "5", "--mode", "pvanish")
    assert code == 0
    assert doc["reducible"] == 6
    rec = doc["solutions"][0]
    assert {"solution", "properties", "verified"} <= set(rec)
    assert set(rec["solution"]) == {"family", "q", "kind", "constituents"}


def test_enumerate_sylp_text(capsys):
    code, out, _ = run(capsys, "enumerate", "--family", "u3", "--q", "5", "--mode", "sylp")
    assert code == 0
    lines = out.splitlines()
    assert lines[:4] == ["(1,2,2,6)", "(2,4,6)", "(2,5)", "(3)"]


def test_property_check_fails_at_q5(capsys):
    code, _, _ = run(capsys, "enumerate", "--family", "gl2", "--q", "5", "--mode", "pvanish",
                     "--check-properties")
    assert code == 1
    code, _, _ = run(capsys, "enumerate", "--family", "gl2", "--q", "7", "--mode", "pvanish",
                     "--check-properties")
    assert code == 0


def test_table_commands(capsys):
    code, doc = run_json(capsys, "table", "validate", "--family", "gl2", "--q", "3")
    assert code == 0 and doc["reports"][0]["checks"]["row_orthogonality"]
    code, doc = run_json(capsys, "table", "list")
    assert [f["family"] for f in doc["families"]] == ["2b2", "gl2", "gl3", "sl2", "sl3-n3", "su3-n3", "u3"]
    code, doc = run_json(capsys, "table", "show", "--family", "sl2", "--q", "5")
    assert code == 0 and doc["table"]["order"] == 120
    code, doc = run_json(capsys, "table", "validate", "--family", "su3-n3")
    assert code == 0 and [r["q"] for r in doc["reports"]] == ["q=3", "q=4", "q=7", "q=9"]


def test_decompose(capsys):
    code, doc = run_json(capsys, "decompose", "--family", "gl3", "--q", "4")
    assert code == 0 and doc["delta"] == [1, 2, 7, 8]
    code, doc = run_json(capsys, "decompose", "--family", "u3", "--q", "5", "--set", "8")
    assert {"v": [2, 2, 2, 6], "c": "1"} not in doc["decompositions"]["8"]  # c is relative to |G|_p
    assert any(d["v"] == [2, 2, 2, 6] for d in doc["decompositions"]["8"])


def test_count_check(capsys):
    code, doc = run_json(capsys, "count-check", "--family", "2b2", "--q", "32")
    assert code == 0 and doc["expected"] == doc["found"] == 10


def test_oracle_and_crosscheck(capsys):
    code, doc = run_json(capsys, "oracle", "--group", "SL(2,5)", "--dixon", "--pvanish", "5")
    assert code == 0 and doc["order"] == 120 and doc["validation"]["ok"]
    assert len(doc["pvanish"]) == 2
    code, doc = run_json(capsys, "crosscheck", "--family", "sl2", "--q", "7")
    assert code == 0 and doc["tables"]["ok"] and doc["solutions"]["ok"]


def test_weyl(capsys):
    code, doc = run_json(capsys, "weyl", "--type", "G2", "--check-uniqueness")
    assert code == 0
    assert doc["uniqueness"]["one_collisions"] == [["chi5", "chi6"]]
    code, out, _ = run(capsys, "weyl", "--type", "A2", "--format", "csv")
    assert out.splitlines()[0].startswith("char,degree,one{}")


@pytest.mark.parametrize("argv", [
    ["enumerate", "--family", "u3", "--q", "5"],
    ["count-check", "--family", "nope", "--q", "3"],
    ["table", "validate", "--family", "su3-n3", "--q", "5"],
    ["weyl", "--type", "E8"],
    ["oracle", "--group", "sl2:17"],
    ["crosscheck", "--family", "u3", "--q", "9"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_usage_error_json(capsys):
    code, out, _ = run(capsys, "weyl", "--type", "E8", "--json")
    assert code == 2
    doc = json.loads(out)
    assert doc["ok"] is False and "E8" in doc["error"]


def test_csv_requires_tabular_output(capsys):
    code, _, err = run(capsys, "oracle", "--group", "SL(2,3)", "--format", "csv")
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["enumerate", "--family", "gl3", "--q", "4", "--mode", "pvanish", "--json"],
    ["weyl", "--type", "B3", "--check-uniqueness", "--json"],
    ["audit", "degrees", "--all"],
])
def test_deterministic_bytes(argv):
    cmd = [sys.executable, "-m", "cvan.cli", *argv]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
