import csv
import io
import json

import pytest

from fuzzplan.cli import main


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_evaluate_low_defect_band(capsys):
    code = main(["evaluate", "--plan", "87,5,1,0,3", "--fuzzy", "0.01,0.02,0.03", "--nu", "0,0.3"])
    assert code == 0
    rows = _csv(capsys.readouterr().out)
    assert float(rows[0]["pa_lo"]) == pytest.approx(0.28, abs=0.01)
    assert float(rows[0]["pa_hi"]) == pytest.approx(0.95, abs=0.01)
    assert float(rows[1]["pa_lo"]) == pytest.approx(0.36, abs=0.01)
    # four decimals by default
    assert len(rows[0]["pa_lo"].split(".")[1]) == 4


def test_evaluate_with_lot_size_reports_ati(capsys):
    assert main(["evaluate", "--plan", "87,5,1,0,3", "--fuzzy", "0,0,0", "--lot-size", "1000", "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["schema_version"] == 1
    assert out["rows"][0]["ati_lo"] == out["rows"][0]["ati_hi"] == 87


def test_design_single_clean_lot_row(capsys):
    code = main(["design", "--aql", "0.01", "--lql", "0.04", "--k-max", "1"])
    assert code == 0
    row = _csv(capsys.readouterr().out)[0]
    assert [row[c] for c in ("n", "m", "k", "c1", "c2")] == ["87", "5", "1", "0", "3"]


def test_design_infeasible_exit_one(capsys):
    assert main(["design", "--aql", "0.001", "--lql", "0.01", "--n-max", "5"]) == 1
    assert _csv(capsys.readouterr().out)[0]["binding"] == "lql"


def test_malformed_fuzzy_exits_two_without_output(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = main(["evaluate", "--plan", "87,5,1,0,3", "--fuzzy", "0.03,0.02,0.04", "-o", str(out)])
    assert code == 2
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_all_validation_problems_reported_together(capsys):
    code = main(["evaluate", "--plan", "87,5", "--fuzzy", "x,y", "--nu", "2"])
    assert code == 2
    err = capsys.readouterr().err
    assert err.count("error:") >= 3


def test_reports_are_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["band", "--plan", "86,5,1,1,4", "--fuzzy", "0.02,0.03,0.04", "--model", "poisson", "-o", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    rows = _csv(paths[0].read_text())
    assert list(rows[0]) == ["theta", "nu", "p_lo", "p_hi", "pa_lo", "pa_hi", "with_errors"]
    assert len(rows) == 44


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"task": "evaluate", "plan": [87, 5, 1, 0, 3], "fuzzy": [0.01, 0.02, 0.03], "nu": [0.0]}))
    assert main(["evaluate", "--config", str(cfg), "--nu", "1"]) == 0
    rows = _csv(capsys.readouterr().out)
    assert len(rows) == 1 and rows[0]["nu"] == "1.0000"
    assert rows[0]["pa_lo"] == rows[0]["pa_hi"]


def test_config_task_mismatch(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"task": "design"}))
    assert main(["evaluate", "--config", str(cfg), "--plan", "87,5,1,0,3", "--fuzzy", "0.01,0.02,0.03"]) == 2


def test_jobs_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("FUZZPLAN_JOBS", "2")
    args = ["simulate", "--plan", "87,5,1,0,3", "--p", "0.02", "--lots", "140000", "--format", "json", "--raw"]
    assert main(args) == 0
    parallel = capsys.readouterr().out
    monkeypatch.setenv("FUZZPLAN_JOBS", "oops")
    assert main(args) == 2
    capsys.readouterr()
    monkeypatch.delenv("FUZZPLAN_JOBS")
    assert main(args) == 0
    assert capsys.readouterr().out == parallel


def test_simulate_json_and_trace(tmp_path, capsys):
    tr = tmp_path / "trace.csv"
    code = main(["simulate", "--plan", "87,5,1,0,3", "--p", "0.02", "--lots", "20000", "--format", "json", "--trace", str(tr)])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert {"accept_rate", "stderr", "lots_counted", "analytic"} <= set(out)
    assert abs(out["accept_rate"] - out["analytic"]) < 0.05
    assert tr.read_text().startswith("lot,d,clean_prev,accepted,counted")


def test_simulate_bad_warmup(capsys):
    assert main(["simulate", "--plan", "87,5,1,0,3", "--p", "0.02", "--lots", "50", "--warmup", "100"]) == 2


def test_compare_pairs(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"task": "compare", "pairs": [[0.01, 0.05]], "c2_max": 25}))
    assert main(["compare", "--config", str(cfg), "--gmds-k-max", "1"]) == 0
    row = _csv(capsys.readouterr().out)[0]
    assert row["ssp"] == "132" and row["mds"] == "87"
    assert int(row["gmds"]) <= int(row["mds"])


def test_perturb_table(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    baseline = {"plan": [86, 5, 1, 1, 4], "fuzzy": [0.02, 0.03, 0.04], "model": "poisson"}
    cfg.write_text(json.dumps({"task": "perturb", "baseline": baseline}))
    args = ["perturb", "--config", str(cfg), "--plan", "87,5,1,0,3", "--fuzzy", "0.01,0.02,0.03", "--errors", "0.01,0.08"]
    assert main(args) == 0
    rows = _csv(capsys.readouterr().out)
    assert len(rows) == 7
    assert float(rows[2]["pe_lo"]) == pytest.approx(0.1190, abs=0.01)
    for r in rows:
        assert float(r["pe_lo"]) <= float(r["pa_lo"]) and float(r["pe_hi"]) <= float(r["pa_hi"])


def test_band_theta_out_of_range(capsys):
    assert main(["band", "--plan", "86,5,1,1,4", "--fuzzy", "0.02,0.03,0.04", "--thetas", "0.99"]) == 2
    assert "theta=0.99" in capsys.readouterr().err


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
