import json

import pytest

from qdilate.cli import EXIT_HYPOTHESIS, EXIT_OK, EXIT_PARSE, EXIT_VERIFICATION, main
from qdilate.corpus import epsilon_triple
from qdilate.documents import TupleDocument, dump_document

NOT_Q_COMMUTING = {
    "matrices": [
        [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]],
        [[[0.0, 0.0], [0.5, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
    ]
}


@pytest.fixture
def epsilon_file(tmp_path):
    path = tmp_path / "epsilon.json"
    path.write_text(dump_document(TupleDocument.from_tuple(epsilon_triple(), name="epsilon")))
    return path


def test_detect(epsilon_file, capsys):
    assert main(["detect", str(epsilon_file)]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["row_contraction"] is True
    assert out["q"]["k"] == 3
    assert set(out["doubly_q"]) == {"0,1", "0,2", "1,2"}


def test_detect_not_q_commuting(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(NOT_Q_COMMUTING))
    assert main(["detect", str(path)]) == EXIT_HYPOTHESIS
    assert "members 0 and 1" in capsys.readouterr().err


def test_malformed_input(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{")
    assert main(["classify", str(path)]) == EXIT_PARSE
    assert main(["classify", str(tmp_path / "missing.json")]) == EXIT_PARSE


def test_classify_and_reduce(epsilon_file, capsys):
    assert main(["classify", str(epsilon_file)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "TypeIII"
    assert report["unitarily_equivalent"] is False
    assert main(["reduce", str(epsilon_file)]) == EXIT_OK
    red = json.loads(capsys.readouterr().out)
    assert red["kind"] == "GeneralTriple"
    assert red["scalars"]["beta"] == pytest.approx([-1.0, 0.0], abs=1e-9)


def test_dilate_then_verify(epsilon_file, tmp_path, capsys):
    cert = tmp_path / "cert.json"
    assert main(["dilate", str(epsilon_file), "--degree", "3", "--out", str(cert)]) == EXIT_OK
    data = json.loads(cert.read_text())
    assert data["provenance"]["config"]["N"] == 3
    assert data["report"]["passed"] is True
    capsys.readouterr()

    assert main(["verify", str(epsilon_file), str(cert)]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["report"]["passed"] is True

    data["V"][0][0] = [2.0, 0.0]
    cert.write_text(json.dumps(data))
    assert main(["verify", str(epsilon_file), str(cert)]) == EXIT_VERIFICATION


def test_verify_rejects_small_tamper(epsilon_file, tmp_path):
    """
    Shifting one stored entry of a unitary by ``1e-3`` is caught.
    """
    cert = tmp_path / "cert.json"
    assert main(["dilate", str(epsilon_file), "--degree", "3", "--out", str(cert)]) == EXIT_OK
    data = json.loads(cert.read_text())
    assert data["provenance"]["config"]["mode"] == "cyclic"
    data["operators"][0]["entries"][0][2][0] += 1e-3
    cert.write_text(json.dumps(data))
    assert main(["verify", str(epsilon_file), str(cert)]) == EXIT_VERIFICATION


def test_windowed_flag(epsilon_file, capsys):
    assert main(["dilate", str(epsilon_file), "--degree", "2", "--mode", "windowed"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["provenance"]["config"]["mode"] == "windowed"


def test_ring_below_degree_is_rejected(epsilon_file):
    assert main(["dilate", str(epsilon_file), "--degree", "5", "--ring", "4"]) == EXIT_PARSE


def test_gen_folder(tmp_path):
    folder = tmp_path / "corpus"
    assert main(["gen", "--kind", "type3", "--count", "3", "--seed", "4", "--out", str(folder)]) == EXIT_OK
    names = sorted(p.name for p in folder.iterdir())
    assert names == ["type3-4.json", "type3-5.json", "type3-6.json"]
    doc = TupleDocument.model_validate_json((folder / "type3-5.json").read_text())
    assert doc.seed == 5


def test_gen_then_dilate(tmp_path, capsys):
    path = tmp_path / "t1.json"
    assert main(["gen", "--kind", "type1", "--seed", "2", "--out", str(path)]) == EXIT_OK
    assert main(["dilate", str(path), "--degree", "2"]) == EXIT_OK
    assert "type1" in capsys.readouterr().err


def test_tolerance_from_environment(epsilon_file, monkeypatch):
    monkeypatch.setenv("QDILATE_TOL", "not-a-number")
    assert main(["detect", str(epsilon_file)]) == EXIT_PARSE
    assert main(["--tol", "1e-9", "detect", str(epsilon_file)]) == EXIT_OK


def test_demo(capsys):
    assert main(["demo", "--degree", "3"]) == EXIT_OK
    rows = json.loads(capsys.readouterr().out)
    assert [row["name"] for row in rows] == ["epsilon", "type1", "type2", "type3"]
    assert all(row["passed"] for row in rows)
    assert rows[0]["route"] == "anti"
