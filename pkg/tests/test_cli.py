import json

import pytest

from aoif.cli import main

TABLE1 = {"sources": [{"lambda": l, "service": {"type": "exponential", "rate": 12}} for l in (1, 2, 3)],
          "preemption": {"preset": "global"}}
TWO = {"sources": [{"lambda": 1, "service": {"type": "exponential", "rate": 2}}] * 2,
       "preemption": {"preset": "global"}}


@pytest.fixture
def write(tmp_path):
    def _write(obj, name="cfg.json"):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)
    return _write


def test_analyze_table1(write, capsys):
    assert main(["analyze", write(TABLE1), "--source", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["sources"][0]["mean_aoi"] == pytest.approx(1.5, abs=5e-5)


def test_analyze_writes_grids_and_generator(write, tmp_path, capsys):
    out_dir = tmp_path / "out"
    assert main(["analyze", write(TABLE1), "--out", str(out_dir), "--grid-points", "50",
                 "--dump-generator"]) == 0
    csv_text = (out_dir / "source2.csv").read_text()
    lines = csv_text.split("\n")
    assert lines[0] == "x,pdf_aoi,cdf_aoi,pdf_paoi,cdf_paoi"
    assert len(lines) == 52 and lines[-1] == ""
    assert "\r" not in csv_text
    assert (out_dir / "generator_source3.csv").read_text().startswith("matrix,stage,source,phase")
    assert len(json.loads(capsys.readouterr().out)["sources"]) == 3


def test_analyze_is_deterministic(write, tmp_path, capsys):
    cfg = write(TABLE1)
    main(["analyze", cfg, "--out", str(tmp_path / "a"), "--grid-points", "20"])
    first = capsys.readouterr().out
    main(["analyze", cfg, "--out", str(tmp_path / "b"), "--grid-points", "20"])
    assert capsys.readouterr().out == first
    assert (tmp_path / "a/source1.csv").read_bytes() == (tmp_path / "b/source1.csv").read_bytes()


def test_missing_sources(write, capsys):
    assert main(["analyze", write({})]) == 1
    assert "sources" in capsys.readouterr().err


def test_invalid_grid(write, capsys):
    assert main(["analyze", write(TABLE1), "--grid-points", "1"]) == 1
    assert "invalid grid" in capsys.readouterr().err


def test_bad_source_index(write):
    assert main(["analyze", write(TABLE1), "--source", "7"]) == 1


def test_simulate_summary_and_csv(write, tmp_path, capsys):
    out = tmp_path / "sim.csv"
    assert main(["simulate", write(TWO), "--cycles", "2000", "--seed", "3", "--out", str(out),
                 "--grid-points", "10"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["seed"] == 3 and len(summary["sources"]) == 2
    lines = out.read_text().splitlines()
    assert lines[0] == "source,x,pdf_aoi,cdf_aoi,pdf_paoi,cdf_paoi"
    assert len(lines) == 21


def test_validate_starvation(write):
    starving = {"sources": [{"lambda": 1, "service": {"type": "exponential", "rate": 1},
                             "error_prob": 1, "retx_prob": 1}]}
    assert main(["validate", write(starving)]) == 4


def test_validate_too_few_cycles(write, capsys):
    assert main(["validate", write(TABLE1), "--cycles", "100"]) == 3
    out = json.loads(capsys.readouterr().out)
    assert out["pass"] is False and "insufficient cycles" in out["hint"]


def test_validate_passes(write, capsys):
    assert main(["validate", write(TWO), "--cycles", "200000"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert all(s["ks_aoi"] <= 0.01 and s["ks_paoi"] <= 0.01 for s in out["sources"])


def test_optimize_corners(write, tmp_path, capsys):
    out = tmp_path / "lattice.csv"
    assert main(["optimize", write(TWO), "--alpha", "1", "--resolution", "1.0", "--out", str(out)]) == 0
    assert "P_d*=1.00 P21*=1.00 P12*=1.00" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 9


def test_optimize_rejects_three_sources(write):
    assert main(["optimize", write(TABLE1)]) == 1


def test_optimize_rejects_bad_resolution(write):
    assert main(["optimize", write(TWO), "--resolution", "0.3"]) == 1


@pytest.mark.parametrize("table", ["table1", "table2"])
def test_repro_tables(table, tmp_path, capsys):
    out = tmp_path / f"{table}.csv"
    assert main(["repro", table, "--out", str(out)]) == 0
    assert "PASS" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 1 + (30 if table == "table1" else 54)


def test_repro_mismatch_exit_code(monkeypatch, capsys):
    from aoif import reference
    bad = dict(reference.TABLE1)
    key = next(iter(bad))
    bad[key] = (9.0,) + bad[key][1:]
    monkeypatch.setattr(reference, "TABLE1", bad)
    assert main(["repro", "table1"]) == 5
    assert "expected 9.0000" in capsys.readouterr().out
