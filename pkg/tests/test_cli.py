import csv
import json

import numpy as np
import pytest

from fcpd.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from fcpd.core import FunctionalSeries, write_csv
from fcpd.simulation import Scenario, SegmentSpec, generate_series


@pytest.fixture
def step_csv(tmp_path):
    series, _ = generate_series(Scenario((SegmentSpec(150, mean=1), SegmentSpec(150, mean=2)), m=20))
    path = tmp_path / "step.csv"
    write_csv(series, path)
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_detect_constant_csv(tmp_path):
    src = tmp_path / "c.csv"
    src.write_text("0.1,0.2\n0.1,0.2\n0.1,0.2\n")
    out = tmp_path / "r.json"
    assert main(["detect", str(src), "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["changepoints"] == [] and doc["alpha"] == 0.001


def test_detect_malformed_csv_leaves_no_output(tmp_path):
    src = tmp_path / "bad.csv"
    src.write_text("1,2\n3,oops\n5,6\n")
    out = tmp_path / "r.json"
    assert main(["detect", str(src), "--out", str(out)]) == EXIT_DATA
    assert not out.exists()
    assert list(tmp_path.iterdir()) == [src]


def test_detect_with_alpha_and_overrides(step_csv, tmp_path):
    out = tmp_path / "r.json"
    assert main(["detect", str(step_csv), "--header", "--out", str(out), "--alpha", "0.001"]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["alpha"] == 0.001
    assert any(abs(t - 150) <= 5 for t in doc["changepoints"])
    fixed = tmp_path / "f.json"
    assert main(["detect", str(step_csv), "--header", "--out", str(fixed),
                 "--lambda", "5", "--c", "10"]) == EXIT_OK
    assert json.loads(fixed.read_text())["tuned"]["tvn"] == {"c": 10, "lambda": 5.0}


def test_usage_errors(step_csv, tmp_path):
    out = str(tmp_path / "r.json")
    assert main(["detect", str(step_csv), "--header", "--out", out, "--alpha", "2"]) == EXIT_USAGE
    assert main(["detect", str(step_csv), "--header", "--out", out, "--lambda", "3"]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["bench", "--sizes", "10", "--out", out]) == EXIT_USAGE


def test_tune_writes_selection_and_table(step_csv, tmp_path):
    out, table = tmp_path / "t.json", tmp_path / "t.csv"
    assert main(["tune", str(step_csv), "--header", "--out", str(out), "--table", str(table),
                 "--grid-min", "0.5", "--grid-max", "1.5", "--grid-step", "0.5"]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert set(doc["tuned"]) == {"tvn", "fpc1"}
    assert len(_rows(table)) == 2 * 3 * 3


def _scenario(tmp_path, **spec):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(spec))
    return path


def test_simulate_null(tmp_path):
    sc = _scenario(tmp_path, kind="none", family="gp", n=400, m=20, seed=5, replicates=20)
    out = tmp_path / "sim"
    assert main(["simulate", str(sc), "--out", str(out)]) == EXIT_OK
    rows = _rows(out / "replicates.csv")
    assert len(rows) == 20
    assert [int(r["replicate"]) for r in rows] == list(range(20))
    summary = {r["statistic"]: r for r in _rows(out / "summary.csv")}
    assert float(summary["mean"]["annotation_error"]) <= 0.2


def test_simulate_single_replicate_and_determinism(tmp_path):
    sc = _scenario(tmp_path, kind="sparse", varied="variance", n_changes=2,
                   length_range=[100, 150], m=15, seed=9)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", str(sc), "--out", str(a), "--replicates", "1"]) == EXIT_OK
    assert len(_rows(a / "replicates.csv")) == 1
    assert main(["simulate", str(sc), "--out", str(a), "--replicates", "3", "--no-timing"]) == EXIT_OK
    assert main(["simulate", str(sc), "--out", str(b), "--replicates", "3", "--no-timing"]) == EXIT_OK
    for name in ("replicates.csv", "summary.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_simulate_rejects_bad_scenario(tmp_path):
    sc = _scenario(tmp_path, kind="medium")
    assert main(["simulate", str(sc), "--out", str(tmp_path / "o")]) == EXIT_DATA
    assert not (tmp_path / "o").exists()


def test_bench_rows(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--sizes", "200", "--replicates", "1", "--out", str(out)]) == EXIT_OK
    rows = _rows(out)
    assert len(rows) == 1 and int(rows[0]["n"]) == 200 and float(rows[0]["median_ms"]) > 0


def test_inputs_untouched(step_csv, tmp_path):
    before = step_csv.read_bytes()
    main(["detect", str(step_csv), "--header", "--out", str(tmp_path / "r.json")])
    assert step_csv.read_bytes() == before
