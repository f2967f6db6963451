import json

import pytest

from unital_ks import cli
from unital_ks.exceptions import MapDocumentError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def mapfile(tmp_path):
    def write(doc):
        path = tmp_path / "map.json"
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(path)

    return write


FAMILY_16 = {"family": {"a": 1, "k": 0.6}}


def test_parse_forms():
    phi = cli.parse_map_document('{"lambda": [0.1, 0, 0], "T": [[1,0,0],[0,1,0],[0,0,1]]}')
    assert phi.lam[0] == 0.1
    assert cli.parse_map_document('{"builtin": "transposition"}').T[1, 1] == -1
    assert cli.parse_map_document(json.dumps(FAMILY_16)).T[2, 2] == 0.6


@pytest.mark.parametrize(
    "text, line, column",
    [
        ('{"lambda": [1, 0, 0]\n "T": 3}', 2, 2),
        ('{"builtin": "identity",\n  "family": {"a": 0, "k": 0}}', 1, 1),
        ('{\n  "family": {"a": 2, "k": 0}}', 2, 3),
        ('{"lambda": [1, 0, 0],\n "T": [[1, 0], [0, 1, 0], [0, 0, 1]]}', 2, 2),
        ('{"lambda": [1, 0, 0]}', 1, 2),
        ('{"builtin": "swap"}', 1, 2),
        ('{"lambda": [1, 0, true], "T": [[0,0,0],[0,0,0],[0,0,0]]}', 1, 2),
        ('{"colour": 1}', 1, 2),
        ("[]", 1, 1),
    ],
)
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(MapDocumentError) as info:
        cli.parse_map_document(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert str(info.value).startswith(f"{line}:{column}: ")


def test_positivity(capsys, mapfile):
    code, out, _ = run(capsys, "positivity", "--map", mapfile({"builtin": "identity"}))
    assert code == 0 and json.loads(out)["positive"] is True
    code, out, _ = run(capsys, "positivity", "--map", mapfile({"builtin": "transposition"}))
    assert code == 0
    code, out, _ = run(capsys, "positivity", "--map", mapfile(FAMILY_16))
    doc = json.loads(out)
    assert code == 1 and doc["positive"] is False
    assert set(doc) == {"positive", "margin", "max_g", "witness_w", "seed"}
    w = doc["witness_w"]
    assert w[0] == pytest.approx(-0.857, abs=1e-3)
    assert (w[1] ** 2 + w[2] ** 2) ** 0.5 == pytest.approx(0.514, abs=1e-3)


def test_ks(capsys, mapfile):
    code, out, _ = run(capsys, "ks", "--map", mapfile({"builtin": "identity"}))
    assert code == 0 and json.loads(out)["verdict"] == "NoViolationFound"
    code, out, _ = run(capsys, "ks", "--map", mapfile({"builtin": "transposition"}), "--seed", "7")
    doc = json.loads(out)
    assert code == 1 and doc["verdict"] == "ViolationFound" and doc["seed"] == 7
    assert doc["min_defect_eigenvalue"] <= -0.99
    assert len(doc["witness"]["w"]) == 3 and len(doc["witness"]["w0"]) == 2
    code, out, _ = run(capsys, "ks", "--map", mapfile({"family": {"a": 0.5, "k": 0.4}}))
    assert code == 0 and json.loads(out)["verdict"] == "NoViolationFound"


def test_choi(capsys, mapfile):
    code, out, _ = run(capsys, "choi", "--map", mapfile(FAMILY_16))
    doc = json.loads(out)
    assert code == 0 and doc["normalized"] is False
    assert doc["eigenvalues"] == pytest.approx([1.28102, 1.0, 0.0, -0.28102], abs=1e-4)
    code, out, _ = run(capsys, "choi", "--map", mapfile({"builtin": "identity"}), "--normalized")
    assert json.loads(out)["eigenvalues"] == pytest.approx([1, 0, 0, 0], abs=1e-12)


def test_witness(capsys, mapfile):
    code, out, _ = run(capsys, "witness", "--map", mapfile({"builtin": "transposition"}))
    doc = json.loads(out)
    assert code == 0 and doc["is_witness"] and doc["entangled_state_value"] == pytest.approx(-1)
    code, out, _ = run(capsys, "witness", "--map", mapfile({"builtin": "identity"}))
    assert code == 1 and json.loads(out)["not_completely_positive"] is False
    code, out, _ = run(capsys, "witness", "--map", mapfile(FAMILY_16))
    doc = json.loads(out)
    assert doc["not_completely_positive"] and not doc["positive"]


def test_family(capsys):
    code, out, _ = run(capsys, "family", "--a", "0.5", "--k", "0.4", "--budget", "1000")
    doc = json.loads(out)
    assert code == 0 and doc["m1"] == pytest.approx(0.66) and doc["thm46"] is True
    assert doc["example_5_1"] is None
    code, out, _ = run(capsys, "family", "--a", "1", "--k", "0.6", "--budget", "1000")
    doc = json.loads(out)
    assert doc["m1"] == pytest.approx(1.36) and doc["thm46"] is False
    assert doc["example_5_1"] is True and doc["ks_numeric"] == "ViolationFound"
    assert doc["notes"]
    code, out, _ = run(capsys, "family", "--a", "0", "--k", "0", "--budget", "1000")
    doc = json.loads(out)
    assert doc["m1"] == 0 and doc["numeric_F_max"] == 0
    assert doc["m2"] is None and doc["m2_reason"]


def test_family_keys_are_fixed(capsys):
    keys = set()
    for a, k in (("0.5", "0.4"), ("1", "0.6"), ("0.2", "0.8")):
        _, out, _ = run(capsys, "family", "--a", a, "--k", k, "--budget", "100")
        keys.add(frozenset(json.loads(out)))
    assert len(keys) == 1


def test_input_errors_exit_2(capsys, mapfile, tmp_path):
    code, _, err = run(capsys, "ks", "--map", mapfile('{"lambda": [1, 0, 0]\n "T": 3}'))
    assert code == 2 and "2:2:" in err
    code, _, _ = run(capsys, "ks", "--map", str(tmp_path / "missing.json"))
    assert code == 2
    code, _, _ = run(capsys, "family", "--a", "2", "--k", "0")
    assert code == 2
    code, _, _ = run(capsys, "scan", "--out", str(tmp_path / "nope" / "x.csv"))
    assert code == 2
    code, _, _ = run(capsys, "scan", "--step", "0", "--out", str(tmp_path / "x.csv"))
    assert code == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["ks"])
    assert info.value.code == 2


def test_scan_csv(capsys, tmp_path):
    out = tmp_path / "a.csv"
    args = ["scan", "--a-min", "0.5", "--a-max", "0.5", "--k-min", "0", "--k-max", "0.7",
            "--step", "0.01", "--budget", "300"]
    code, stdout, _ = run(capsys, *args, "--out", str(out))
    assert code == 0 and "cells=71" in stdout and "seed=42" in stdout
    lines = out.read_text().splitlines()
    assert len(lines) == 72
    rows = [line.split(",") for line in lines[1:]]
    assert all((r[4] == "1") == (float(r[1]) <= 0.5) for r in rows)
    again = tmp_path / "b.csv"
    run(capsys, *args, "--out", str(again))
    assert out.read_bytes() == again.read_bytes()


def test_scan_empty_range(capsys, tmp_path):
    out = tmp_path / "e.csv"
    code, _, _ = run(capsys, "scan", "--a-min", "0.6", "--a-max", "0.5", "--out", str(out))
    assert code == 0
    assert out.read_text() == "a,k,positive,positivity_margin,thm46,m1,m4,ks_numeric,min_defect_eig\n"
