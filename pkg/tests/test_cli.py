"""End-to-end checks of the command-line interface."""

from __future__ import annotations

import json
import pathlib
import subprocess
import sys

import jsonschema
import pytest

from arknit.cli import main, normalize_text
from arknit.quiver import parse_quiver, serialize_quiver

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
SCHEMAS = (
    pathlib.Path(__file__).resolve().parent.parent
    / "src"
    / "arknit"
    / "schemas"
)


def _schema(name):
    with open(SCHEMAS / ("%s.json" % name), encoding="utf-8") as fh:
        return json.load(fh)


def _run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def _check(doc, name):
    jsonschema.validate(doc, _schema(name))


# -- exit codes --------------------------------------------------------------


def test_validate_ok_exit_zero(capsys):
    assert main(["validate", str(DATA / "a3.quiver")]) == 0
    out = capsys.readouterr().out
    assert "ok: True" in out


def test_validate_garbage_exit_64(tmp_path, capsys):
    bad = tmp_path / "garbage.quiver"
    bad.write_text("v 1\nq what\n", encoding="utf-8")
    assert main(["validate", str(bad)]) == 64
    err = capsys.readouterr().err
    assert "line 2" in err
    assert "column" in err


def test_missing_file_exit_64(capsys):
    assert main(["validate", "no_such_file.quiver"]) == 64


def test_unknown_verb_exit_64(capsys):
    assert main(["frobnicate", str(DATA / "a2.quiver")]) == 64


def test_unknown_flag_exit_64(capsys):
    assert main(["validate", str(DATA / "a2.quiver"), "--wat"]) == 64


def test_no_verb_exit_64(capsys):
    assert main([]) == 64


def test_help_exit_zero(capsys):
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    assert "finite-type" in out


def test_computation_error_exit_one(capsys):
    assert main(["mesh", str(DATA / "a3.quiver")]) == 1
    assert "translation quiver" in capsys.readouterr().err


def test_degree_unknown_arrow_exit_one(capsys):
    code = main(["degree", str(DATA / "a3.quiver"), "--arrow", "99"])
    assert code == 1


def test_finite_type_exit_codes(capsys):
    assert main(["finite-type", str(DATA / "a3.quiver"), "--bound", "10"]) == 0
    capsys.readouterr()
    code = main(["finite-type", str(DATA / "atilde2.quiver"), "--bound", "6"])
    assert code == 2
    out = capsys.readouterr().out
    assert "inconclusive" in out


# -- JSON documents and schemas ----------------------------------------------


def test_validate_json_schema(capsys):
    code, doc = _run_json(
        capsys, ["validate", str(DATA / "a3_ar.quiver"), "--json"]
    )
    assert code == 0
    _check(doc, "validate")
    assert doc["report"]["notes"]["kind"] == "translation"


def test_mesh_json_schema(capsys):
    code, doc = _run_json(capsys, ["mesh", str(DATA / "a3_ar.quiver"), "--json"])
    assert code == 0
    _check(doc, "mesh")
    assert doc["report"]["with_length"]["ok"]
    assert doc["report"]["sectional"]["ok"]


def test_cover_json_schema(capsys):
    code, doc = _run_json(
        capsys,
        ["cover", str(DATA / "a3_ar.quiver"), "--radius", "8", "--json"],
    )
    assert code == 0
    _check(doc, "cover")
    assert doc["report"]["check"]["ok"]


def test_knit_json_schema(capsys):
    code, doc = _run_json(
        capsys, ["knit", str(DATA / "a3.quiver"), "--bound", "10", "--json"]
    )
    assert code == 0
    _check(doc, "knit")
    rep = doc["report"]
    assert not rep["truncated"]
    assert len(rep["modules"]) == 6
    assert rep["meshes"] == 3
    dims = sorted(tuple(m["dim_vector"]) for m in rep["modules"])
    assert dims == [
        (0, 0, 1),
        (0, 1, 0),
        (0, 1, 1),
        (1, 0, 0),
        (1, 1, 0),
        (1, 1, 1),
    ]
    # the serialized translation quiver can be fed back in
    again = parse_quiver(rep["tq_text"])
    assert sorted(again.vertices) == sorted(m["vid"] for m in rep["modules"])


def test_degree_json_schema_left(capsys):
    code, doc = _run_json(
        capsys,
        [
            "degree",
            str(DATA / "a3.quiver"),
            "--arrow",
            "3",
            "--side",
            "left",
            "--bound",
            "8",
            "--json",
        ],
    )
    assert code == 0
    _check(doc, "degree")
    deg = doc["report"]["degree"]
    assert deg["outcome"] == "finite"
    assert deg["n"] == 2
    assert deg["witness_module"] == [0, 0, 1]
    assert doc["report"]["arrow"]["src_module"] == [1, 1, 1]
    assert doc["report"]["arrow"]["tgt_module"] == [1, 1, 0]


def test_degree_json_schema_right(capsys):
    code, doc = _run_json(
        capsys,
        [
            "degree",
            str(DATA / "a3.quiver"),
            "--arrow",
            "1",
            "--side",
            "right",
            "--bound",
            "8",
            "--json",
        ],
    )
    assert code == 0
    _check(doc, "degree")
    deg = doc["report"]["degree"]
    assert deg["side"] == "right"
    assert deg["n"] == 1


def test_finite_type_json_schema(capsys):
    code, doc = _run_json(
        capsys,
        ["finite-type", str(DATA / "a3.quiver"), "--bound", "10", "--json"],
    )
    assert code == 0
    _check(doc, "finite-type")
    rep = doc["report"]
    assert rep["verdict"] == "finite"
    assert rep["projective_degrees"] == {"1": 2, "2": 1}
    assert rep["injective_degrees"] == {"2": 1, "3": 2}


def test_probe_json_schema(capsys):
    code, doc = _run_json(
        capsys,
        ["probe", str(DATA / "a3.quiver"), "--radius", "8", "--json"],
    )
    assert code == 0
    _check(doc, "probe")
    assert doc["report"]["assignment"]["ok"]
    assert doc["report"]["probe"]["ok"]


def test_error_document_json_schema(tmp_path, capsys):
    bad = tmp_path / "bad.quiver"
    bad.write_text("a 1 1 2\n", encoding="utf-8")
    code, doc = _run_json(capsys, ["validate", str(bad), "--json"])
    assert code == 64
    _check(doc, "error")
    assert doc["error"]["kind"] == "parse"
    code, doc = _run_json(
        capsys, ["mesh", str(DATA / "a2.quiver"), "--json"]
    )
    assert code == 1
    _check(doc, "error")
    assert doc["error"]["kind"] == "computation"


def test_json_single_document(capsys):
    assert main(["finite-type", str(DATA / "a2.quiver"), "--json"]) == 0
    out = capsys.readouterr().out
    json.loads(out)  # exactly one document, nothing trailing


def test_json_deterministic(capsys):
    argv = ["knit", str(DATA / "d4.quiver"), "--bound", "10", "--json"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second


# -- --out and round trips ---------------------------------------------------


def test_out_writes_file_and_not_stdout(tmp_path, capsys):
    target = tmp_path / "report.json"
    code = main(
        [
            "validate",
            str(DATA / "a2.quiver"),
            "--json",
            "--out",
            str(target),
        ]
    )
    assert code == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(target.read_text(encoding="utf-8"))
    _check(doc, "validate")


@pytest.mark.parametrize(
    "name", sorted(p.name for p in DATA.glob("*.quiver"))
)
def test_round_trip_shipped_examples(name):
    text = (DATA / name).read_text(encoding="utf-8")
    assert serialize_quiver(parse_quiver(text)) == normalize_text(text)


def test_console_invocation_subprocess():
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "arknit.cli",
            "finite-type",
            str(DATA / "a2.quiver"),
            "--bound",
            "6",
            "--json",
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["report"]["verdict"] == "finite"
