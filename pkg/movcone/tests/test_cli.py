import json

import pytest

from movcone.cli import main
from movcone.utils.corpus import corpus_path


@pytest.fixture(autouse=True)
def plain_output(monkeypatch):
    monkeypatch.setenv("MOVCONE_COLOR", "0")


@pytest.fixture
def fourfold_file():
    return str(corpus_path("fourfold_example"))


@pytest.fixture
def corrupted_file(tmp_path):
    data = json.loads(corpus_path("fourfold_example").read_text(encoding="utf-8"))
    data["models"][0]["extremal_rays"][0]["flip"]["flipped_curve"] = [0, 0, 1]
    path = tmp_path / "corrupted.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_mov(fourfold_file, capsys):
    assert main(["mov", fourfold_file]) == 0
    assert capsys.readouterr().out == "0,1,0;1,0,1;1,1,0\n"


def test_mov_json(fourfold_file, capsys):
    assert main(["mov", fourfold_file, "--json"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["rays"] == [["0", "1", "0"], ["1", "0", "1"], ["1", "1", "0"]]
    assert document["lineality"] == []


def test_sequences(fourfold_file, capsys):
    assert main(["sequences", fourfold_file]) == 0
    assert capsys.readouterr().out == "nu: X -> X1 (len 1)\ngamma: X -> X2 (len 1)\n"


def test_eq(fourfold_file, capsys):
    assert main(["eq", fourfold_file]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6
    assert lines[0] == "-1,1,1\t-Gamma+Lambda+E\tnef-of X:gamma -> X2"


def test_eq_json(fourfold_file, capsys):
    assert main(["eq", fourfold_file, "--json"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["root"] == "X"
    assert len(document["classes"]) == 6


def test_validate(fourfold_file, capsys):
    assert main(["validate", fourfold_file]) == 0
    captured = capsys.readouterr()
    assert captured.out == "5 of 5 checks passed\n"
    assert "ok model X" in captured.err


def test_validate_failure(corrupted_file, capsys):
    assert main(["validate", corrupted_file]) == 3
    captured = capsys.readouterr()
    assert "FAIL flip X:nu -> X1" in captured.err
    assert "check (a)" in captured.err


def test_computations_refuse_invalid_graphs(corrupted_file, capsys):
    assert main(["mov", corrupted_file]) == 3
    assert capsys.readouterr().out == ""


def test_dual(capsys):
    assert main(["dual", "--gens", "1,0;0,1"]) == 0
    assert capsys.readouterr().out == "0,1;1,0\n"
    assert main(["dual", "--ineqs", "", "--dim", "2"]) == 0
    assert capsys.readouterr().out == "0,1;1,0;0,-1;-1,0\n"


def test_dual_needs_a_dimension(capsys):
    assert main(["dual", "--gens", ""]) == 4
    assert capsys.readouterr().err.startswith("error: ")


def test_slice(fourfold_file, capsys):
    assert main(["slice", fourfold_file, "--plane", "1,1,1"]) == 0
    first = capsys.readouterr().out
    assert first == "0,1,0\n1/2,0,1/2\n1/2,1/2,0\n"
    assert main(["slice", fourfold_file, "--plane", "1,1,1", "--model", "X2"]) == 0
    assert capsys.readouterr().out == first


def test_slice_not_sliceable(fourfold_file, capsys):
    assert main(["slice", fourfold_file, "--cone", "mor", "--plane", "1,1,1", "--model", "X1"]) == 4


def test_cycle(capsys):
    assert main(["sequences", str(corpus_path("cycle"))]) == 4
    assert "error: flip cycle: A -> B -> A" in capsys.readouterr().err


def test_parse_errors(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    assert main(["mov", str(path)]) == 2
    assert main(["mov", str(tmp_path / "absent.json")]) == 2


def test_crosscheck(fourfold_file, capsys):
    assert main(["mov", fourfold_file, "--crosscheck"]) == 0
    assert main(["mov", str(corpus_path("threefold_example")), "--crosscheck"]) == 4
    assert "declares no effective generators" in capsys.readouterr().err


def test_colour(monkeypatch, capsys):
    monkeypatch.setenv("MOVCONE_COLOR", "1")
    assert main(["sequences", str(corpus_path("cycle"))]) == 4
    assert "\033[31merror: flip cycle" in capsys.readouterr().err
