"""Univariate projections of a functional series.

Two summaries per curve: its discrete total variation (within-curve
variability) and its score on the leading functional principal component
(between-curve variability).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DegenerateCovarianceError, FunctionalSeries, ProjectedSeries, Source


@dataclass(frozen=True)
class Eigenfunction:
    values: np.ndarray
    eigenvalue: float


def trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    """Quadrature weights ``w`` with ``sum(w * f)`` the trapezoid integral of ``f``."""
    grid = np.asarray(grid, dtype=float)
    h = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


def tvn_projection(series: FunctionalSeries) -> ProjectedSeries:
    """Discrete total variation ``sum_j |f_t(s_{j+1}) - f_t(s_j)|`` of every curve."""
    tv = np.abs(np.diff(series.values, axis=1)).sum(axis=1)
    return ProjectedSeries(tv, Source.TVN)


def empirical_covariance(series) -> np.ndarray:
    """Pointwise sample covariance (divisor ``n - 1``) as an ``m x m`` matrix.

    Accepts a :class:`FunctionalSeries` or a raw ``n x m`` array with ``n >= 2``.
    """
    values = np.asarray(getattr(series, "values", series), dtype=float)
    if values.ndim != 2 or values.shape[0] < 2:
        raise ValueError("covariance needs an n x m array with n >= 2")
    x = values - values.mean(axis=0)
    cov = x.T @ x / (values.shape[0] - 1)
    return (cov + cov.T) / 2


def leading_eigenfunction(cov: np.ndarray, grid: np.ndarray) -> Eigenfunction:
    """Leading eigenpair of the covariance operator under trapezoid quadrature.

    Solves ``C W phi = lam phi`` with ``W = diag(w)`` by symmetrizing to
    ``W^1/2 C W^1/2``. ``phi`` is normalized so that ``sum(w * phi**2) = 1`` and
    its largest-magnitude entry is positive.
    """
    cov = np.asarray(cov, dtype=float)
    w = trapezoid_weights(grid)
    if cov.shape != (w.size, w.size):
        raise ValueError(f"covariance shape {cov.shape} does not match grid of {w.size}")
    scale = np.max(np.abs(cov)) if cov.size else 0.0
    if not np.isfinite(scale) or scale == 0.0:
        raise DegenerateCovarianceError("degenerate covariance")
    root_w = np.sqrt(w)
    sym = root_w[:, None] * cov * root_w[None, :]
    sym = (sym + sym.T) / 2
    evals, evecs = np.linalg.eigh(sym)
    lam = float(evals[-1])
    if lam <= 1e-14 * scale * w.sum():
        raise DegenerateCovarianceError("degenerate covariance")
    phi = evecs[:, -1] / root_w
    phi /= np.sqrt(np.sum(w * phi**2))
    if phi[np.argmax(np.abs(phi))] < 0:
        phi = -phi
    return Eigenfunction(phi, lam)


def fpc1_projection(series: FunctionalSeries) -> ProjectedSeries:
    """Scores of the centered curves on the leading eigenfunction."""
    centered = series.values - series.values.mean(axis=0)
    # identical rows leave only rounding noise after centering
    if np.max(np.abs(centered)) <= 1e-12 * max(1.0, np.max(np.abs(series.values))):
        raise DegenerateCovarianceError("degenerate covariance")
    eig = leading_eigenfunction(empirical_covariance(series), series.grid)
    w = trapezoid_weights(series.grid)
    return ProjectedSeries(centered @ (w * eig.values), Source.FPC1)
