import csv
import io
import json

import pytest

from evenprec import cli


def run(capsys, *argv):
    rc = cli.dispatch(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_grid_inclusive():
    assert cli.parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    assert cli.parse_grid("0:1:0.25")[-1] == 1.0
    assert cli.parse_grid("1,2.5") == [1.0, 2.5]
    with pytest.raises(ValueError):
        cli.parse_grid("1:0:0.1")


def test_gme_witness_example(capsys):
    rc, out, _ = run(capsys, "gme-witness", "--n", "4", "--delta", "0", "--pg", "0.3")
    assert rc == 0
    (row,) = rows_of(out)
    assert row["detected"] == "true"
    assert float(row["score"]) == pytest.approx(0.2625, abs=1e-12)


def test_spin_vs_j_example(capsys):
    rc, out, _ = run(capsys, "spin-vs-j", "--k", "4", "--j-max", "10", "--delta", "opt")
    assert rc == 0
    rows = {r["j"]: r for r in rows_of(out)}
    assert float(rows["2"]["score"]) == pytest.approx(0.375, abs=1e-12)
    assert list(rows)[:3] == ["0", "1/2", "1"]


def test_cv_scan_example(capsys):
    rc, out, err = run(capsys, "cv-scan", "--k", "4", "--delta-grid", "0.1:6:0.05", "--dim", "512")
    assert rc == 0
    rows = rows_of(out)
    assert len(rows) == 119
    assert any(r["violation"] == "true" and 0 < float(r["delta"]) < 1 for r in rows)
    assert "warning" in err
    deltas = [float(r["delta"]) for r in rows]
    assert deltas == sorted(deltas)


def test_cv_scan_round_trip(capsys):
    rc, out, _ = run(capsys, "cv-scan", "--k", "6", "--delta-grid", "0.6:0.7:0.05", "--dim", "128")
    rows = rows_of(out)
    rc2, out2, _ = run(capsys, "cv-scan", "--k", "6", "--delta-grid", ",".join(r["delta"] for r in rows),
                       "--dim", "128")
    assert [r["score"] for r in rows] == [r["score"] for r in rows_of(out2)]


def test_json_format_mirrors_csv(capsys):
    rc, out, _ = run(capsys, "cv-gaussian-bound", "--k", "4", "--delta", "1", "--sigma-grid", "1:2:0.5",
                     "--format", "json")
    doc = json.loads(out)
    assert doc["meta"]["version"] and doc["meta"]["config"]["k"] == 4
    assert [set(r) for r in doc["rows"]] == [{"sigma", "bound"}] * 3


def test_classical_field_and_mc(capsys, tmp_path):
    path = tmp_path / "field.csv"
    rc, _, _ = run(capsys, "classical-field", "--k", "4", "--delta", "1", "--resolution", "5", "--output", str(path))
    assert rc == 0
    data = path.read_bytes()
    assert b"\r" not in data
    rows = rows_of(data.decode("utf-8"))
    assert len(rows) == 25 and set(rows[0]) == {"ax", "ay", "score"}
    rc, out, _ = run(capsys, "classical-mc", "--k", "6", "--n", "2000", "--format", "json")
    doc = json.loads(out)
    assert sum(r["count"] for r in doc["rows"]) == 2000


def test_spin_scan(capsys):
    rc, out, _ = run(capsys, "spin-scan", "--k", "4", "--j-list", "2,5/2", "--delta-grid", "0:4:1")
    assert rc == 0
    rows = rows_of(out)
    assert len(rows) == 10
    assert rows[0]["gme_flag"] == "true"


def test_spin_convergence_small(capsys):
    rc, out, _ = run(capsys, "spin-convergence", "--k", "4", "--j-list", "3,5", "--dim", "64", "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    assert [r["j"] for r in doc["rows"]] == ["3", "5"]


def test_cv_wigner_small(capsys):
    rc, out, _ = run(capsys, "cv-wigner", "--k", "4", "--delta", "0.64", "--dim", "64", "--points", "21",
                     "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    assert len(doc["rows"]) == 441
    assert doc["meta"]["negativity_volume"] > 0


def test_sample_summary(capsys, tmp_path):
    summary = tmp_path / "s.json"
    rc, out, _ = run(capsys, "sample", "--system", "classical", "--ax", "0", "--ay", "10", "--rounds", "400",
                     "--seed", "3", "--summary", str(summary))
    assert rc == 0
    s = json.loads(summary.read_text())
    assert set(s) == {"mean", "stderr", "rounds", "seed", "oracle", "z"}
    assert s["oracle"] == 0.25
    assert rows_of(out)[0].keys() == {"round", "k", "inside", "contribution"}


def test_config_file_supplies_defaults(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 4, "delta": 0.0, "pg": 0.6}))
    rc, out, _ = run(capsys, "gme-witness", "--config", str(cfg))
    assert rc == 0 and rows_of(out)[0]["detected"] == "false"


@pytest.mark.parametrize("argv", [["bogus"], [], ["cv-scan", "--k", "5"], ["gme-witness", "--n", "3"],
                                  ["sample", "--rounds", "0"], ["spin-scan", "--j-list", "1/3"],
                                  ["cv-scan", "--delta-grid", "1:0:0.1"]])
def test_validation_errors_exit_one(capsys, argv):
    rc, _, err = run(capsys, *argv)
    assert rc == 1
    assert err


def test_numerical_failure_exit_two(capsys, monkeypatch):
    from evenprec import eigen

    def boom(*a, **k):
        raise eigen.NumericalError("residual too large")

    monkeypatch.setattr("evenprec.oscillator.largest_eigenpair", boom)
    rc, _, err = run(capsys, "cv-scan", "--delta-grid", "1:1:1", "--dim", "32")
    assert rc == 2 and "numerical" in err
