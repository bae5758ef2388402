from __future__ import annotations

import io
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from kanfin import cli
from kanfin.errors import InvariantViolation
from kanfin.schemas import REPORT, SCHEMAS

DATA = Path(__file__).resolve().parent.parent / "data"


def run(*argv):
    buf = io.StringIO()
    code, data = cli.run(list(argv) + ["--deterministic"], out=buf)
    return code, data, buf.getvalue()


def test_filters_listing():
    code, data, _ = run("filters", "--size", "3")
    assert code == 0
    assert data["result"]["count"] == 8
    assert data["verdicts"] == {"bruteforce-agreement": "pass", "count": "pass", "sigma-bijective": "pass"}
    code, data, _ = run("filters", "--size", "3", "--ultra")
    assert code == 0 and data["result"]["generators"] == [1, 2, 4]


def test_codensity_report():
    code, data, _ = run("codensity", "--trunc", "4", "--at", "4", "--expect", "4")
    assert code == 0
    assert data["result"]["labels"] == [{"principal_at": x} for x in range(4)]


def test_reports_validate_against_schema():
    for argv in (["comma", "--size", "3", "--trunc", "2", "--surjective"],
                 ["laws", "--monad", "powerset", "--bound", "2"],
                 ["pentagon", "--flavor", "action", "--x", "2", "--param", "Z2"],
                 ["algebras", "--monad", "powerset", "--carrier", "2", "--maps"],
                 ["ran", "--functor", "identity", "--trunc", "2", "--at", "3", "--oracle"],
                 ["limit", str(DATA / "cospan.json"), "--oracle"]):
        code, data, text = run(*argv)
        assert code == 0, argv
        jsonschema.validate(data, REPORT)
        assert json.loads(text) == data


def test_deterministic_output_is_byte_identical():
    argv = ["pushforward", "--monad", "powerset", "--trunc", "2", "--at", "2", "--unit", "--mult"]
    first = run(*argv)[2]
    second = run(*argv)[2]
    assert first == second
    buf = io.StringIO()
    _, data = cli.run(argv, out=buf)
    assert "timestamp" in data


def test_table_format_renders_same_verdicts():
    code, data, text = run("filters", "--size", "2", "--format", "table")
    assert code == 0
    assert "PASS     count" in text
    assert "count: 4" in text


def test_global_flags_before_subcommand():
    buf = io.StringIO()
    code, data = cli.run(["--format", "table", "--deterministic", "filters", "--size", "1"], out=buf)
    assert code == 0 and "timestamp" not in data
    assert buf.getvalue().startswith("command:")


def test_usage_error_exit_1():
    assert run("filters")[0] == 1
    assert run("no-such-command")[0] == 1


def test_failed_check_exit_1():
    code, data, _ = run("determined", "--monad", "powerset", "--trunc", "2", "--bound", "3", "--expect", "yes")
    assert code == 1
    assert data["verdicts"]["verdict-as-expected"] == "fail"
    assert data["witnesses"]["verdict-as-expected"] == {"determined": False}


def test_data_errors_exit_2(tmp_path):
    assert run("laws", "--monad", "nope")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("validate", str(bad))[0] == 2
    missing = tmp_path / "cat.json"
    missing.write_text(json.dumps({"objects": 1}))
    assert run("validate", str(missing))[0] == 2
    assert run("limit", str(tmp_path / "absent.json"))[0] == 2
    notmonoid = tmp_path / "m.json"
    notmonoid.write_text(json.dumps({"size": 2, "unit": 0, "table": [[0, 0], [0, 1]]}))
    assert run("laws", "--monad", "action", "--monoid", str(notmonoid))[0] == 2


def test_resource_exit_3():
    code, data, _ = run("--budget", "5", "codensity", "--trunc", "2", "--at", "3")
    assert code == 3
    assert data["verdicts"]["run"] == "resource"
    jsonschema.validate(data, REPORT)


def test_invariant_exit_4(monkeypatch):
    def boom(args, rep):
        raise InvariantViolation("forced")

    monkeypatch.setattr(cli, "cmd_filters", boom)
    assert run("filters", "--size", "1")[0] == 4


def test_validate_files():
    for name in ("arrow.json", "cospan.json", "z3.json"):
        assert run("validate", str(DATA / name))[0] == 0
    code, _, _ = run("validate", str(DATA / "arrow.json"), "--kind", "category")
    assert code == 0


def test_broken_category_reported(tmp_path):
    doc = json.loads((DATA / "arrow.json").read_text())
    doc["compose"] = [[0, 0, 0], [1, 1, 1], [2, 0, 2], [1, 2, 0]]
    p = tmp_path / "broken.json"
    p.write_text(json.dumps(doc))
    code, data, _ = run("validate", str(p))
    assert code == 1 and data["witnesses"]["category-axioms"]


def test_functor_file(tmp_path):
    f = tmp_path / "f.json"
    # the arrow category onto its terminal quotient is not a functor into itself; collapse to object 1
    f.write_text(json.dumps({"obj_map": [1, 1], "mor_map": [1, 1, 1]}))
    a = str(DATA / "arrow.json")
    assert run("validate", str(f), "--kind", "functor", "--source", a, "--target", a)[0] == 0
    f.write_text(json.dumps({"obj_map": [0, 1], "mor_map": [0, 1, 0]}))
    assert run("validate", str(f), "--kind", "functor", "--source", a, "--target", a)[0] == 1


def test_user_monoid_file():
    code, data, _ = run("pentagon", "--flavor", "action", "--x", "1", "--param", str(DATA / "z3.json"))
    assert code == 0
    code, data, _ = run("algebras", "--monad", "action", "--monoid", str(DATA / "z3.json"), "--carrier", "1")
    assert code == 0 and data["result"]["count"] == 1


def test_schema_command():
    for name in SCHEMAS:
        code, data, _ = run("schema", name)
        assert code == 0 and data["result"]["schema"] == SCHEMAS[name]
    jsonschema.validate(json.loads((DATA / "cospan.json").read_text()), SCHEMAS["diagram"])
    jsonschema.validate(json.loads((DATA / "z3.json").read_text()), SCHEMAS["monoid"])


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kanfin.cli", "filters", "--size", "2", "--deterministic"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["count"] == 4


@pytest.mark.parametrize("argv", [
    ["stabilize", "--monad", "exception:E=1", "--at-max", "2", "--trunc-max", "3"],
    ["comparison", "--case", "identity"],
    ["limit-fuzz", "--count", "10"],
    ["univ-check", "--trunc", "1", "--bound", "2"],
])
def test_other_commands_run(argv):
    code, data, _ = run(*argv)
    assert code == 0
    jsonschema.validate(data, REPORT)
