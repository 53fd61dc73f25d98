"""Accuracy of an estimated changepoint set against the truth."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class ErrorSummary:
    annotation: int
    energy: Optional[float]  # None when exactly one set is empty


def annotation_error(x, y) -> int:
    return abs(len(x) - len(y))


def energy_distance(x, y) -> Optional[float]:
    """Energy distance between two point sets.

    Two empty sets are at distance 0; if only one is empty the distance is
    undefined and ``None`` is returned.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size == 0 and y.size == 0:
        return 0.0
    if x.size == 0 or y.size == 0:
        return None
    cross = np.abs(x[:, None] - y[None, :]).mean()
    within_x = np.abs(x[:, None] - x[None, :]).mean()
    within_y = np.abs(y[:, None] - y[None, :]).mean()
    d = 2.0 * cross - within_x - within_y
    return max(0.0, float(d))


def summarize(estimated, truth) -> ErrorSummary:
    return ErrorSummary(annotation_error(estimated, truth), energy_distance(estimated, truth))


def log1p_error(value: Optional[float]) -> Optional[float]:
    """``log(1 + error)``, the scale used for plotting error distributions."""
    return None if value is None else math.log1p(value)
