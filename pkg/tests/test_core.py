import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fcpd.core import (
    ChangepointReport,
    DataError,
    FunctionalSeries,
    ProjectedSeries,
    Region,
    RegionCandidate,
    Source,
    emit_report,
    load_csv,
    parse_report,
    write_csv,
)


def _report(changepoints=(), alpha=0.001):
    cands = [RegionCandidate(Region(1, 100, 0), t, 5.0, 1e-8, 1e-8) for t in changepoints]
    return ChangepointReport(
        changepoints=tuple(changepoints),
        per_projection={Source.TVN: cands, Source.FPC1: []},
        tuned={Source.TVN: (3.5, 4), Source.FPC1: (1.25, 7)},
        alpha=alpha,
    )


def test_load_constant_csv(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("0.1,0.2\n0.1,0.2\n0.1,0.2\n")
    series = load_csv(path)
    assert (series.n, series.m) == (3, 2)
    np.testing.assert_array_equal(series.values, [[0.1, 0.2]] * 3)
    assert np.all((series.grid > 0) & (series.grid < 1))


def test_load_reports_bad_cell_location(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\nx,2\n3,4\n")
    with pytest.raises(DataError, match=r"\(2,1\)"):
        load_csv(path)


def test_load_header_grid(tmp_path):
    path = tmp_path / "h.csv"
    path.write_text("s=0.25,s=0.75\n1,2\n3,4\n5,6\n")
    series = load_csv(path, has_header=True)
    np.testing.assert_array_equal(series.grid, [0.25, 0.75])
    assert series.n == 3


def test_load_rejects_ragged_and_short(tmp_path):
    ragged = tmp_path / "r.csv"
    ragged.write_text("1,2\n1,2,3\n1,2\n")
    with pytest.raises(DataError, match="row 2"):
        load_csv(ragged)
    short = tmp_path / "s.csv"
    short.write_text("1,2\n1,2\n")
    with pytest.raises(DataError, match="at least 3"):
        load_csv(short)


def test_series_validation():
    with pytest.raises(DataError):
        FunctionalSeries.from_array(np.ones((3, 2)), grid=[0.5, 0.2])
    with pytest.raises(DataError):
        FunctionalSeries.from_array([[1.0, np.nan]] * 3)
    with pytest.raises(DataError):
        ProjectedSeries([-1.0, 2.0], Source.TVN)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(3, 8), st.integers(2, 6)),
              elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_csv_round_trip(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("rt") / "x.csv"
    series = FunctionalSeries.from_array(values)
    write_csv(series, path)
    again = load_csv(path, has_header=True)
    np.testing.assert_array_equal(again.values, series.values)
    np.testing.assert_array_equal(again.grid, series.grid)


def test_emit_empty_and_singleton():
    assert json.loads(emit_report(_report()))["changepoints"] == []
    assert json.loads(emit_report(_report((50,))))["changepoints"] == [50]


def test_emit_is_idempotent():
    text = emit_report(_report((10, 50)))
    assert emit_report(parse_report(text)) == text
    doc = json.loads(text)
    assert doc["tuned"]["tvn"] == {"c": 4, "lambda": 3.5}
    assert list(doc) == sorted(doc)


def test_report_check_catches_violations():
    _report((10, 50)).check(n=100)
    bad = ChangepointReport((50, 10), {Source.TVN: [], Source.FPC1: []}, {}, 0.001)
    with pytest.raises(AssertionError):
        bad.check()
