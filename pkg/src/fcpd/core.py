"""Data model for functional time series and detection reports.

Changepoint indices are 1-based throughout: a changepoint at ``t`` means the
distribution differs between observations ``t`` and ``t + 1``.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class DataError(ValueError):
    """Malformed or invalid input data."""


class DegenerateCovarianceError(ValueError):
    """Raised when the covariance has no principal direction."""


class Source(str, enum.Enum):
    TVN = "tvn"
    FPC1 = "fpc1"


def uniform_grid(m: int) -> np.ndarray:
    """Equally spaced interior grid ``j / (m + 1)``, ``j = 1..m``."""
    return np.arange(1, m + 1, dtype=float) / (m + 1)


@dataclass(frozen=True)
class FunctionalSeries:
    """``n`` curves observed on a shared grid of ``m`` points.

    Row ``t`` of ``values`` holds curve ``f_t`` evaluated on ``grid``.
    """

    values: np.ndarray
    grid: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise DataError(f"values must be a 2-D array, got shape {values.shape}")
        n, m = values.shape
        if n < 3:
            raise DataError(f"need at least 3 functions, got {n}")
        if m < 2:
            raise DataError(f"need at least 2 grid points, got {m}")
        if not np.all(np.isfinite(values)):
            row, col = np.argwhere(~np.isfinite(values))[0]
            raise DataError(f"non-finite value at row {row + 1}, column {col + 1}")
        grid = uniform_grid(m) if self.grid is None else np.array(self.grid, dtype=float)
        if grid.shape != (m,):
            raise DataError(f"grid has {grid.size} points but values have {m} columns")
        if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
            raise DataError("grid must be finite and strictly increasing")
        values.setflags(write=False)
        grid.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "grid", grid)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_array(cls, values, grid=None) -> "FunctionalSeries":
        return cls(np.asarray(values, dtype=float), None if grid is None else np.asarray(grid))


@dataclass(frozen=True)
class ProjectedSeries:
    values: np.ndarray
    source: Source

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(values)):
            raise DataError("projected values must be finite")
        if self.source is Source.TVN and np.any(values < 0):
            raise DataError("TVN projections are non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "source", Source(self.source))

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class Region:
    """Closed 1-based interval ``[lo, hi]`` around changeset ``changeset_index``."""

    lo: int
    hi: int
    changeset_index: int

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class RegionCandidate:
    region: Region
    location: int
    statistic: float
    raw_p: float
    adjusted_p: Optional[float] = None


@dataclass(frozen=True)
class ChangepointReport:
    changepoints: tuple
    per_projection: dict
    tuned: dict
    alpha: float
    diagnostics: tuple = field(default_factory=tuple)

    def check(self, n: Optional[int] = None) -> None:
        """Assert the report invariants; raises ``AssertionError`` on violation."""
        cps = list(self.changepoints)
        assert cps == sorted(set(cps)), "changepoints must be sorted and unique"
        assert 0 < self.alpha < 1
        if n is not None:
            assert all(1 <= t <= n - 1 for t in cps)
        significant = set()
        for cands in self.per_projection.values():
            for cand in cands:
                assert cand.region.lo <= cand.location < cand.region.hi
                assert cand.adjusted_p is not None and cand.adjusted_p >= cand.raw_p
                if cand.adjusted_p <= self.alpha:
                    significant.add(cand.location)
        assert significant == set(cps), "changepoints must be the significant candidates"


# --- CSV ---------------------------------------------------------------------

def _parse_header_cell(cell: str, col: int) -> float:
    text = cell.strip()
    if text.lower().startswith("s="):
        text = text[2:]
    try:
        return float(text)
    except ValueError:
        raise DataError(f"bad grid header cell {cell!r} at row 1, column {col}") from None


def load_csv(path, has_header: bool = False) -> FunctionalSeries:
    """Read a series with rows = time and columns = grid points.

    A header of ``s=<value>`` cells supplies the grid; otherwise a uniform
    interior grid on (0, 1) is used. Error messages carry the 1-based file
    row and column of the offending cell.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    grid = None
    rows = []
    width = None
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, raw in enumerate(csv.reader(fh), start=1):
            if not raw or all(not c.strip() for c in raw):
                continue
            if has_header and grid is None and lineno == 1:
                grid = [_parse_header_cell(c, j) for j, c in enumerate(raw, start=1)]
                width = len(grid)
                continue
            if width is None:
                width = len(raw)
            elif len(raw) != width:
                raise DataError(
                    f"ragged row {lineno}: expected {width} columns, got {len(raw)}")
            row = []
            for col, cell in enumerate(raw, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    raise DataError(
                        f"non-numeric cell {cell!r} at ({lineno},{col})") from None
                if not math.isfinite(value):
                    raise DataError(f"non-finite cell {cell!r} at ({lineno},{col})")
                row.append(value)
            rows.append(row)
    if len(rows) < 3:
        raise DataError(f"{path}: need at least 3 data rows, got {len(rows)}")
    return FunctionalSeries(np.array(rows, dtype=float), None if grid is None else np.array(grid))


def write_csv(series: FunctionalSeries, path, header: bool = True) -> None:
    """Write ``series`` so that :func:`load_csv` reproduces it exactly."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if header:
            writer.writerow([f"s={repr(float(s))}" for s in series.grid])
        for row in series.values:
            writer.writerow([repr(float(v)) for v in row])


# --- JSON report ---------------------------------------------------------------

def _candidate_to_dict(cand: RegionCandidate) -> dict:
    return {
        "region": [cand.region.lo, cand.region.hi],
        "changeset_index": cand.region.changeset_index,
        "location": cand.location,
        "statistic": cand.statistic,
        "raw_p": cand.raw_p,
        "adjusted_p": cand.adjusted_p,
    }


def report_to_dict(report: ChangepointReport) -> dict:
    tuned = {}
    for src in Source:
        pair = report.tuned.get(src)
        tuned[src.value] = None if pair is None else {"lambda": float(pair[0]), "c": int(pair[1])}
    return {
        "alpha": float(report.alpha),
        "changepoints": [int(t) for t in report.changepoints],
        "diagnostics": list(report.diagnostics),
        "per_projection": {
            src.value: [_candidate_to_dict(c) for c in report.per_projection.get(src, [])]
            for src in Source
        },
        "tuned": tuned,
    }


def report_from_dict(data: dict) -> ChangepointReport:
    per_projection = {}
    for src in Source:
        cands = []
        for d in data["per_projection"].get(src.value, []):
            region = Region(int(d["region"][0]), int(d["region"][1]), int(d["changeset_index"]))
            cands.append(RegionCandidate(region, int(d["location"]), float(d["statistic"]),
                                         float(d["raw_p"]), d["adjusted_p"]))
        per_projection[src] = cands
    tuned = {}
    for src in Source:
        pair = data["tuned"].get(src.value)
        tuned[src] = None if pair is None else (float(pair["lambda"]), int(pair["c"]))
    return ChangepointReport(
        changepoints=tuple(int(t) for t in data["changepoints"]),
        per_projection=per_projection,
        tuned=tuned,
        alpha=float(data["alpha"]),
        diagnostics=tuple(data.get("diagnostics", ())),
    )


def emit_report(report: ChangepointReport) -> str:
    """Serialize ``report`` to JSON with sorted keys."""
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def parse_report(text: str) -> ChangepointReport:
    return report_from_dict(json.loads(text))


def as_float_array(y: Sequence[float] | np.ndarray, name: str = "y") -> np.ndarray:
    arr = np.asarray(y, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr

