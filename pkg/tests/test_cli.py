"""End-to-end runs of the command line pipeline."""

import csv
import json

import pytest

from ineqpref import records
from ineqpref.cli import main
from ineqpref.sessions import SurveyStore
from ineqpref.transfers import catalog_from_json

POP_SPEC = {
    "seed": 17,
    "groups": [
        {"count": 2, "model": "egini", "eta": 2.0, "alpha": 2.0,
         "tau1": -0.1, "tau2": 0.1},
        {"count": 1, "model": "util", "epsilon": 0.6, "alpha": 1.0,
         "tau1": -0.1, "tau2": 0.1},
    ],
}


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


class TestCatalog:
    def test_writes_csv_and_json(self, tmp_path, capsys):
        csv_path = tmp_path / "catalog.csv"
        json_path = tmp_path / "catalog.json"
        assert main(["catalog", "--csv", str(csv_path),
                     "--json", str(json_path)]) == 0
        rows = read_csv(csv_path)
        assert len(rows) == 55
        catalog = catalog_from_json(json_path.read_text())
        assert len(catalog) == 55
        assert sum(q.is_test for q in catalog) == 5

    def test_stdout_fallback(self, capsys):
        assert main(["catalog"]) == 0
        out = capsys.readouterr().out
        assert out.count("\n") == 56  # header + 55 rows


class TestSimulateEstimateReport:
    def test_pipeline(self, tmp_path, capsys):
        spec = tmp_path / "population.json"
        spec.write_text(json.dumps(POP_SPEC))
        out_dir = tmp_path / "sim"
        assert main(["simulate", "--spec", str(spec), "--out-dir",
                     str(out_dir), "--replicates", "3"]) == 0
        responses = out_dir / "responses.csv"
        sessions = out_dir / "sessions.csv"
        assert len(read_csv(responses)) == 3 * 3 * 44
        assert len(read_csv(sessions)) == 3

        fits_path = tmp_path / "fits.csv"
        assert main(["estimate", "--responses", str(responses),
                     "--sessions", str(sessions), "--restricted",
                     "--model", "egini", "--optimizer", "bfgs",
                     "--out", str(fits_path)]) == 0
        fits = read_csv(fits_path)
        assert len(fits) == 3
        assert all(f["model"] == "egini" for f in fits)
        assert all(f["converged"] == "true" for f in fits)
        etas = [float(f["eta"]) for f in fits]
        assert all(0.3 < e < 8.0 for e in etas)

        assert main(["report", "--fits", str(fits_path)]) == 0
        out = capsys.readouterr().out
        assert "eta" in out and "median" in out

    def test_model_all_and_report_profile(self, tmp_path, capsys):
        spec = tmp_path / "population.json"
        spec.write_text(json.dumps({
            "seed": 5,
            "groups": [{"count": 1, "model": "egini", "eta": 2.0,
                        "alpha": 2.0, "tau1": -0.1, "tau2": 0.1}],
        }))
        out_dir = tmp_path / "sim"
        main(["simulate", "--spec", str(spec), "--out-dir", str(out_dir),
              "--replicates", "5"])
        fits_path = tmp_path / "fits.csv"
        assert main(["estimate", "--responses",
                     str(out_dir / "responses.csv"),
                     "--model", "all", "--optimizer", "bfgs",
                     "--out", str(fits_path)]) == 0
        fits = read_csv(fits_path)
        assert sorted({f["model"] for f in fits}) \
            == ["egini", "nonparam", "util"]
        assert len(fits) == 3

        assert main(["report", "--fits", str(fits_path)]) == 0
        out = capsys.readouterr().out
        assert "median f(w)" in out
        assert "marginal weight" in out
        assert "median weighting classes" in out


class TestAnalyze:
    def test_acceptance_and_text_tables(self, tmp_path, capsys):
        spec = tmp_path / "population.json"
        spec.write_text(json.dumps(POP_SPEC))
        out_dir = tmp_path / "sim"
        main(["simulate", "--spec", str(spec), "--out-dir", str(out_dir)])
        responses = str(out_dir / "responses.csv")
        sessions = str(out_dir / "sessions.csv")

        assert main(["analyze", "--responses", responses,
                     "--sessions", sessions]) == 0
        out = capsys.readouterr().out
        assert "All transfers" in out

        assert main(["analyze", "--responses", responses,
                     "--sessions", sessions, "--by", "block",
                     "--chi-square"]) == 0
        out = capsys.readouterr().out
        assert "equality across strata" in out
        assert "y1 vs y2" in out or "y1 vs y3" in out

        assert main(["analyze", "--responses", responses,
                     "--sessions", sessions, "--text",
                     "--clarity-filter"]) == 0
        out = capsys.readouterr().out
        assert "PT" in out and "URL" in out

    def test_restricted_needs_sessions(self, tmp_path):
        spec = tmp_path / "population.json"
        spec.write_text(json.dumps(POP_SPEC))
        out_dir = tmp_path / "sim"
        main(["simulate", "--spec", str(spec), "--out-dir", str(out_dir)])
        with pytest.raises(SystemExit):
            main(["analyze", "--responses",
                  str(out_dir / "responses.csv"), "--restricted"])


class TestExport:
    def test_export_replays_event_log(self, tmp_path):
        log = tmp_path / "events.jsonl"
        store = SurveyStore(log_path=log)
        session = store.create_session(seed=13)
        for qid in session.sequence[:4]:
            store.record_answer(session.session_id, qid, "B")
        out_dir = tmp_path / "export"
        assert main(["export", "--log", str(log),
                     "--out-dir", str(out_dir)]) == 0
        rows = read_csv(out_dir / "responses.csv")
        assert len(rows) == 4
        assert tuple(rows[0]) == records.RESPONSES_CSV_COLUMNS
        srows = read_csv(out_dir / "sessions.csv")
        assert len(srows) == 1
        assert srows[0]["error_count"] == ""
