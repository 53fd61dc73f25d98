"""BIC grid search for the fused-lasso penalty and the changeset linkage."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import as_float_array
from .fused_lasso import default_jump_tol, jump_set, tv_denoise
from .regions import (
    adjust_candidates,
    agglomerate,
    build_regions,
    detect_in_regions,
    significant_locations,
)


def _steps(lo: float, hi: float, step: float) -> tuple:
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + i * step, 10) for i in range(count))


@dataclass(frozen=True)
class TuningGrid:
    """Multipliers ``r`` and ``k`` with ``lam = r sqrt(n)`` and ``c = round(k sqrt(n))``."""

    r_values: tuple = field(default_factory=lambda: _steps(0.2, 5.0, 0.1))
    k_values: tuple = field(default_factory=lambda: _steps(0.2, 5.0, 0.1))

    def __post_init__(self):
        if not self.r_values or not self.k_values:
            raise ValueError("tuning grid must be non-empty")
        if min(self.r_values) <= 0 or min(self.k_values) <= 0:
            raise ValueError("grid multipliers must be positive")

    @classmethod
    def from_range(cls, lo: float = 0.2, hi: float = 5.0, step: float = 0.1) -> "TuningGrid":
        values = _steps(lo, hi, step)
        return cls(values, values)

    def lambdas(self, n: int) -> list:
        return [r * math.sqrt(n) for r in self.r_values]

    def linkages(self, n: int) -> list:
        return [max(1, int(round(k * math.sqrt(n)))) for k in self.k_values]


@dataclass(frozen=True)
class BicEvaluation:
    lam: float
    c: int
    changepoints: tuple
    bic: float

    def sort_key(self):
        # parsimony first, then heavier smoothing, then wider linkage
        return (self.bic, len(self.changepoints), -self.lam, -self.c)


def theta_star(y, taus) -> np.ndarray:
    """Replace every segment ``tau_{i-1}+1 .. tau_i`` by its mean."""
    y = as_float_array(y)
    bounds = np.concatenate(([0], np.asarray(taus, dtype=np.int64), [y.size]))
    if np.any(np.diff(bounds) <= 0):
        raise ValueError("changepoints must be strictly increasing inside 1..n-1")
    lengths = np.diff(bounds)
    means = np.add.reduceat(y, bounds[:-1]) / lengths
    return np.repeat(means, lengths)


def bic(y, taus) -> float:
    """Segment-mean SSE plus ``m log n``."""
    y = as_float_array(y)
    sse = float(np.sum((y - theta_star(y, taus)) ** 2))
    return sse + len(taus) * math.log(y.size)


def projection_changepoints(y, theta_hat, partition, alpha: float):
    """Regions, CUSUM and BH for one projection; returns ``(candidates, changepoints)``."""
    regions = build_regions(partition, len(y))
    cands = adjust_candidates(detect_in_regions(y, theta_hat, regions))
    return cands, significant_locations(cands, alpha)


@dataclass(frozen=True)
class GridSearchResult:
    lam: float
    c: int
    changepoints: tuple
    bic: float
    evaluations: tuple = ()


def grid_search(y, grid: TuningGrid | None = None, alpha: float = 0.001,
                cache: bool = True, keep_evaluations: bool = False) -> GridSearchResult:
    """Brute-force BIC minimization over ``grid``.

    With ``cache`` on, one fused-lasso fit is shared by every ``c`` of a given
    ``lam`` and linkages that produce the same changesets are evaluated once;
    the selection is identical to the uncached path.
    """
    y = as_float_array(y)
    grid = grid or TuningGrid()
    n = y.size
    tol = default_jump_tol(y)
    lams = grid.lambdas(n)
    cs = grid.linkages(n)
    bic_memo: dict = {}
    evals = []
    best = None
    for lam in lams:
        fit = tv_denoise(y, lam) if cache else None
        jumps = jump_set(fit, tol) if cache else None
        partition_memo: dict = {}
        for c in cs:
            if not cache:
                fit = tv_denoise(y, lam)
                jumps = jump_set(fit, tol)
            partition = agglomerate(jumps, c)
            key = partition.changesets
            if cache and key in partition_memo:
                cps = partition_memo[key]
            else:
                _, cps = projection_changepoints(y, fit.theta, partition, alpha)
                cps = tuple(cps)
                partition_memo[key] = cps
            if cache and cps in bic_memo:
                value = bic_memo[cps]
            else:
                value = bic(y, cps)
                bic_memo[cps] = value
            ev = BicEvaluation(lam, c, cps, value)
            if keep_evaluations:
                evals.append(ev)
            if best is None or ev.sort_key() < best.sort_key():
                best = ev
    return GridSearchResult(best.lam, best.c, best.changepoints, best.bic, tuple(evals))
