"""Command line: analyze, catalog and verify-paper."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from nullstring import cli
from nullstring import spinor as sp

DOCS = Path(__file__).resolve().parents[1] / "docs"


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def write(tmp_path, doc, name="m.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def test_analyze_dks(capsys):
    code, rep = run_json(capsys, "analyze", str(DOCS / "examples" / "dks.json"))
    assert code == 0
    assert rep["label"] == "D^nn x [-]^e"
    assert rep["curvature"]["R"] == "24*x"
    assert rep["kerrSchild"] == "dKS"
    assert rep["recurrence"]["weyl"] and rep["recurrence"]["r_equals_dlnR"]
    assert [c["name"] for c in rep["congruences"]] == ["m", "l"]
    assert all(c["nonexpanding"] for c in rep["congruences"])
    assert ["vanishing", "C3", "4*x"] in rep["caveats"]


def test_analyze_flat(capsys, tmp_path):
    path = write(tmp_path, {"components": {"Q11": "0", "Q12": "0", "Q22": "0"}})
    code, rep = run_json(capsys, "analyze", path)
    assert code == 0 and rep["label"] == "[-] x [-]"
    assert all(v == "0" for v in rep["curvature"].values())


def test_analyze_einstein_file(capsys):
    code, rep = run_json(capsys, "analyze", str(DOCS / "examples" / "einstein.json"))
    assert code == 0 and rep["einstein"] and rep["curvature"]["R"] == "-4*Lambda"
    assert ["nonzero", "parameter", "Lambda"] in rep["caveats"]


def test_analyze_matrix(capsys):
    code, rep = run_json(capsys, "analyze", str(DOCS / "examples" / "double_null.json"))
    assert code == 0 and rep["form"] == "matrix"
    assert rep["einstein"] and rep["einsteinConstant"] == "Lambda"


def test_analyze_renamed_coordinates(capsys, tmp_path):
    doc = {"coordinates": ["u", "v", "X", "Y"],
           "components": {"Q11": "-X^3 + X*Y", "Q12": "-X^2*Y + 1/2*Y^2 - 1/2", "Q22": "-X*Y^2 - X"}}
    code, rep = run_json(capsys, "analyze", write(tmp_path, doc))
    assert code == 0 and rep["label"] == "D^nn x [-]^e" and rep["curvature"]["R"] == "24*X"


@pytest.mark.parametrize("doc, fragment", [
    ('{"components": {"Q11": "x*(", "Q12": "0", "Q22": "0"}}', "position"),
    ('{"components": {"Q11": "kappa", "Q12": "0", "Q22": "0"}}', "undeclared"),
    ('{"components": {"Q11": "1/0", "Q12": "0", "Q22": "0"}}', "Q11"),
    ('{"components": {"Q11": "0"}}', "Q11, Q12, Q22"),
    ('{"form": "tetrad", "components": {}}', "form"),
    ('{"components": {"Q11": "0", "Q12": "0", "Q22": "0"},\n "parameters": {"a": "big"}}', "flag"),
    ('{"components": [1, 2\n', "line 2"),
])
def test_input_errors(capsys, tmp_path, doc, fragment):
    code, err = run_json(capsys, "analyze", write(tmp_path, doc))
    assert code == 2 and err["error"] == "input"
    assert fragment in err["message"]


def test_missing_file(capsys, tmp_path):
    code, err = run_json(capsys, "analyze", str(tmp_path / "nope.json"))
    assert code == 2


def test_catalog_einstein(capsys):
    code, rep = run_json(capsys, "catalog", "einstein")
    assert code == 0 and rep["einstein"] and rep["curvature"]["R"] == "-4*Lambda"
    assert all(c["pass"] for c in rep["checks"])


def test_catalog_double_null(capsys):
    code, rep = run_json(capsys, "catalog", "double-null")
    assert code == 0
    assert any(c["name"] == "potential" and c["pass"] for c in rep["checks"])


def test_catalog_dks_bound(capsys):
    code, rep = run_json(capsys, "catalog", "dks", "--param", "M0=1", "--param", "N0=0", "--param", "P0=0")
    assert code == 0
    assert rep["petrov"] == "D^nn" and rep["kerrSchild"] == "dKS"
    assert rep["bindings"] == {"M0": "1", "N0": "0", "P0": "0"}


def test_catalog_errors(capsys):
    assert run(capsys, "catalog", "kerr")[0] == 2
    assert run(capsys, "catalog", "dks", "--param", "Q=1")[0] == 2
    assert run(capsys, "catalog", "einstein", "--param", "Lambda=0")[0] == 2
    assert run(capsys, "catalog", "dks", "--param", "M0")[0] == 2


def test_catalog_listing(capsys):
    code, doc = run_json(capsys, "catalog")
    assert code == 0 and "double-null" in doc["entries"]


def test_reports_deterministic(capsys):
    outs = []
    for _ in range(2):
        _, rep = run_json(capsys, "catalog", "non-einstein-2")
        rep.pop("timing")
        outs.append(json.dumps(rep, sort_keys=True))
    assert outs[0] == outs[1]


def test_verify_only_killing(capsys):
    code, doc = run_json(capsys, "verify-paper", "--only=killing")
    assert code == 0 and [s["suite"] for s in doc["suites"]] == ["killing"]


def test_verify_unknown_suite(capsys):
    assert run(capsys, "verify-paper", "--only=nonsense")[0] == 2


def test_verify_epsilon_mutation(capsys, monkeypatch):
    monkeypatch.setattr(sp, "EPS_LOWER", ((0, -1), (1, 0)))
    code, doc = run_json(capsys, "verify-paper", "--only=kernel")
    assert code == 1 and not doc["pass"]
    failed = [c["name"] for c in doc["suites"][0]["checks"] if not c["pass"]]
    assert any("eps" in n for n in failed)


def test_text_format(capsys):
    code, out = run(capsys, "--format", "text", "catalog", "dks")
    assert code == 0 and "label: D^nn x [-]^e" in out


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("NULLSTRING_THREADS", "3")
    assert cli.thread_cap() == 3
    monkeypatch.setenv("NULLSTRING_THREADS", "zero")
    assert cli.thread_cap() == 1
    code, doc = run_json(capsys, "verify-paper", "--only=signature,projective")
    assert code == 0 and [s["suite"] for s in doc["suites"]] == ["projective", "signature"]


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "nullstring.cli", "--format", "text", "verify-paper", "--only=double-null"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0, res.stdout + res.stderr
    assert "overall: PASS" in res.stdout


@pytest.mark.parametrize("argv", [
    ("catalog", "dks"),
    ("catalog", "double-null"),
    ("analyze", str(DOCS / "examples" / "einstein.json")),
    ("analyze", str(DOCS / "examples" / "flat.json")),
])
def test_reports_match_schema(capsys, argv):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((DOCS / "report_schema.json").read_text())
    _, rep = run_json(capsys, *argv)
    jsonschema.validate(rep, schema)
