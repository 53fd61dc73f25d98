"""Simulated functional time series with planted changepoints.

Curves are Gaussian- or t-process draws with a Matern covariance around one
of five mean functions, optionally passed through ``log(1 + exp(z))`` to make
them skewed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .core import FunctionalSeries, uniform_grid

DEFAULT_M = 50
TP_DF = 3.0

# candidate values for the varied parameter
PSI_GRID = (1, 2, 3, 4, 5)
SIGMA2_GRID = (0.50, 0.66, 0.83, 1.00, 1.16, 1.33, 1.50, 1.66, 1.83, 2.00)
RANGE_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)

SPARSE = {"n_changes": 5, "length_range": (5000, 10000)}
DENSE = {"n_changes": 50, "length_range": (500, 1000)}


class Family(str, enum.Enum):
    GP = "gp"
    TP = "tp"


class Transform(str, enum.Enum):
    IDENTITY = "identity"
    LOG_SUM = "log_sum"


class Kind(str, enum.Enum):
    NONE = "none"
    SPARSE = "sparse"
    DENSE = "dense"


class Varied(str, enum.Enum):
    MEAN = "mean"
    VARIANCE = "variance"
    RANGE = "range"


@dataclass(frozen=True)
class MaternParams:
    sigma2: float = 1.0
    range: float = 0.2
    smoothness: float = 1.0

    def __post_init__(self):
        if not (self.sigma2 > 0 and self.range > 0 and self.smoothness > 0):
            raise ValueError(f"Matern parameters must be positive: {self}")


@dataclass(frozen=True)
class SegmentSpec:
    length: int
    mean: int = 0  # psi index 1..5, or 0 for the zero function
    matern: MaternParams = field(default_factory=MaternParams)
    family: Family = Family.GP
    df: float = TP_DF

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("segment length must be >= 1")
        if self.mean not in (0,) + PSI_GRID:
            raise ValueError(f"mean must be 0 or a psi index 1..5, got {self.mean}")
        if self.family is Family.TP and not self.df > 0:
            raise ValueError("t-process degrees of freedom must be positive")


@dataclass(frozen=True)
class Scenario:
    segments: tuple
    transform: Transform = Transform.LOG_SUM
    m: int = DEFAULT_M
    seed: int = 0

    @property
    def grid(self) -> np.ndarray:
        return uniform_grid(self.m)

    @property
    def n(self) -> int:
        return sum(s.length for s in self.segments)

    @property
    def true_changepoints(self) -> tuple:
        return tuple(int(x) for x in np.cumsum([s.length for s in self.segments])[:-1])


def matern_cov(grid, params: MaternParams) -> np.ndarray:
    """Matern covariance in the ``sigma^2 sqrt(pi) r^(2 nu)`` parameterization.

    Zero distance uses the analytic limit ``sigma^2 sqrt(pi) r^(2nu) Gamma(nu) / Gamma(nu + 1/2)``.
    """
    grid = np.asarray(grid, dtype=float)
    nu, r = params.smoothness, params.range
    d = np.abs(grid[:, None] - grid[None, :]) / r
    scale = params.sigma2 * math.sqrt(math.pi) * r ** (2 * nu)
    cov = np.empty_like(d)
    zero = d == 0
    with np.errstate(invalid="ignore", over="ignore"):
        body = scale / (2 ** (nu - 1) * special.gamma(nu + 0.5)) * d**nu * special.kv(nu, d)
    cov[~zero] = body[~zero]
    cov[zero] = scale * special.gamma(nu) / special.gamma(nu + 0.5)
    return np.maximum(cov, cov.T)


def _factor(cov: np.ndarray) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    evals, evecs = np.linalg.eigh((cov + cov.T) / 2)
    if evals.size and evals.min() < -1e-8 * max(1.0, abs(evals.max())):
        raise np.linalg.LinAlgError(f"covariance not PSD: min eigenvalue {evals.min():.3g}")
    return evecs * np.sqrt(np.clip(evals, 0.0, None))


def sample_gp(mean, cov, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """Gaussian draw ``mean + L z`` with ``L L^T = cov`` from an eigen factorization.

    ``size`` draws are stacked as rows when given.
    """
    mean = np.asarray(mean, dtype=float)
    L = _factor(cov)
    z = rng.standard_normal(mean.shape if size is None else (size, mean.size))
    return mean + z @ L.T


def sample_tp(mean, cov, df: float, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """Multivariate-t draw with scale matrix ``cov`` (a Gaussian/chi-square mixture)."""
    mean = np.asarray(mean, dtype=float)
    g = sample_gp(np.zeros_like(mean), cov, rng, size)
    w = rng.chisquare(df, size=None if size is None else (size, 1))
    return mean + g * np.sqrt(df / w)


def log_sum_transform(z) -> np.ndarray:
    """``log(1 + exp(z))`` without overflow."""
    return np.logaddexp(0.0, np.asarray(z, dtype=float))


def psi(index: int, t):
    t = np.asarray(t, dtype=float)
    if index == 1:
        return 5 * t**2 - np.exp(1 - 20 * t)
    if index == 2:
        return 0.5 - 100 * (t - 0.1) * (t - 0.3) * (t - 0.5) * (t - 0.9)
    if index == 3:
        return psi(2, t) + 0.8 * np.sin(1 + 10 * np.pi * t)
    if index == 4:
        return 1 + 3 * t**2 - 5 * t**3 + 0.6 * np.sin(1 + 10 * np.pi * t)
    if index == 5:
        return 1 + 3 * t**2 - 5 * t**3
    raise ValueError(f"psi index must be 1..5, got {index}")


def mean_function(index: int, grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    return np.zeros_like(grid) if index == 0 else psi(index, grid)


def generate_series(scenario: Scenario, rng: Optional[np.random.Generator] = None):
    """Draw every segment i.i.d., concatenate, then apply the transform.

    Returns ``(series, true_changepoints)``.
    """
    rng = rng if rng is not None else np.random.default_rng(scenario.seed)
    grid = scenario.grid
    blocks = []
    for seg in scenario.segments:
        mu = mean_function(seg.mean, grid)
        cov = matern_cov(grid, seg.matern)
        if seg.family is Family.TP:
            blocks.append(sample_tp(mu, cov, seg.df, rng, size=seg.length))
        else:
            blocks.append(sample_gp(mu, cov, rng, size=seg.length))
    values = np.vstack(blocks)
    if scenario.transform is Transform.LOG_SUM:
        values = log_sum_transform(values)
    return FunctionalSeries(values, grid), scenario.true_changepoints


def _draw_no_repeat(choices: Sequence, count: int, rng: np.random.Generator) -> list:
    out = [choices[rng.integers(len(choices))]]
    while len(out) < count:
        pick = choices[rng.integers(len(choices))]
        if pick != out[-1]:
            out.append(pick)
    return out


def sample_scenario(kind, varied=Varied.MEAN, family=Family.GP, rng=None, *,
                    transform=Transform.LOG_SUM, m: int = DEFAULT_M, n: int = 2000,
                    n_changes: Optional[int] = None, length_range: Optional[tuple] = None,
                    seed: int = 0) -> Scenario:
    """Random scenario of the given density.

    The varied parameter cycles through its candidate grid with no immediate
    repeats; the others stay at mean 0 (or psi for mean changes), sigma^2 = 1,
    range 0.2, smoothness 1. ``kind="none"`` gives one segment of length ``n``.
    ``n_changes`` and ``length_range`` override the density presets.
    """
    kind, varied, family = Kind(kind), Varied(varied), Family(family)
    rng = rng if rng is not None else np.random.default_rng(seed)
    base = SegmentSpec(length=1, mean=0, matern=MaternParams(1.0, 0.2, 1.0), family=family)
    if kind is Kind.NONE:
        segments = (replace(base, length=int(n)),)
        return Scenario(segments, Transform(transform), m, seed)
    preset = SPARSE if kind is Kind.SPARSE else DENSE
    count = (preset["n_changes"] if n_changes is None else n_changes) + 1
    lo, hi = preset["length_range"] if length_range is None else length_range
    lengths = rng.integers(lo, hi + 1, size=count)
    if varied is Varied.MEAN:
        values = _draw_no_repeat(PSI_GRID, count, rng)
        segments = [replace(base, length=int(L), mean=v) for L, v in zip(lengths, values)]
    elif varied is Varied.VARIANCE:
        values = _draw_no_repeat(SIGMA2_GRID, count, rng)
        segments = [replace(base, length=int(L), matern=MaternParams(v, 0.2, 1.0))
                    for L, v in zip(lengths, values)]
    else:
        values = _draw_no_repeat(RANGE_GRID, count, rng)
        segments = [replace(base, length=int(L), matern=MaternParams(1.0, v, 1.0))
                    for L, v in zip(lengths, values)]
    return Scenario(tuple(segments), Transform(transform), m, seed)


def scenario_from_dict(spec: dict, rng: Optional[np.random.Generator] = None) -> Scenario:
    """Build a random scenario from a scenario-file mapping.

    Recognized keys: ``kind``, ``varied``, ``family``, ``transform``, ``seed``,
    and optionally ``m``, ``n``, ``n_changes``, ``length_range``.
    """
    known = {"kind", "varied", "family", "transform", "seed", "replicates",
             "m", "n", "n_changes", "length_range"}
    unknown = set(spec) - known
    if unknown:
        raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
    if "kind" not in spec:
        raise ValueError("scenario needs a 'kind'")
    length_range = spec.get("length_range")
    return sample_scenario(
        spec["kind"], spec.get("varied", "mean"), spec.get("family", "gp"), rng,
        transform=spec.get("transform", "log_sum"), m=int(spec.get("m", DEFAULT_M)),
        n=int(spec.get("n", 2000)), n_changes=spec.get("n_changes"),
        length_range=None if length_range is None else tuple(length_range),
        seed=int(spec.get("seed", 0)),
    )
