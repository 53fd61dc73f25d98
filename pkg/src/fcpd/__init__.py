"""Multiple changepoint isolation for functional time series."""

from .core import (
    ChangepointReport,
    DataError,
    DegenerateCovarianceError,
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
from .detector import DetectorConfig, detect
from .tuning import TuningGrid

__all__ = [
    "ChangepointReport",
    "DataError",
    "DegenerateCovarianceError",
    "DetectorConfig",
    "FunctionalSeries",
    "ProjectedSeries",
    "Region",
    "RegionCandidate",
    "Source",
    "TuningGrid",
    "detect",
    "emit_report",
    "load_csv",
    "parse_report",
    "write_csv",
]

__version__ = "0.1.0"
