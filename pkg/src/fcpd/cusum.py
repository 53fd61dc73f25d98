"""Single-changepoint CUSUM test with Kolmogorov p-values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DataError, as_float_array

KOLMOGOROV_TOL = 1e-12
KOLMOGOROV_MAX_TERMS = 100


@dataclass(frozen=True)
class CusumResult:
    statistic: float
    p_value: float
    location: int
    sigma_hat: float


def cusum_process(y) -> np.ndarray:
    """``T[k-1] = n^-1/2 * sum_{t<=k} (y_t - mean(y))`` for ``k = 1..n``."""
    y = as_float_array(y)
    if y.size < 2:
        raise DataError("CUSUM needs at least 2 observations")
    return np.cumsum(y - y.mean()) / math.sqrt(y.size)


def long_run_variance(y, theta_hat) -> float:
    y = as_float_array(y)
    theta_hat = as_float_array(theta_hat, "theta_hat")
    if y.shape != theta_hat.shape:
        raise DataError("y and theta_hat must have equal length")
    if y.size < 2:
        raise DataError("variance needs at least 2 observations")
    return float(np.var(y - theta_hat, ddof=1))


def kolmogorov_cdf(t: float) -> float:
    """Kolmogorov distribution function ``1 - 2 sum_j (-1)^(j+1) exp(-2 j^2 t^2)``.

    The alternating series is cut once a term falls below 1e-12 (at most 100
    terms). Below ``t = 1`` it cancels badly and converges slowly, so the
    equivalent theta-function form ``sqrt(2 pi)/t sum_j exp(-(2j-1)^2 pi^2 / (8 t^2))``
    is summed instead.
    """
    t = float(t)
    if not t > 0:
        return 0.0
    total = 0.0
    if t < 1.0:
        for j in range(1, KOLMOGOROV_MAX_TERMS + 1):
            term = math.exp(-((2 * j - 1) ** 2) * math.pi**2 / (8.0 * t * t))
            total += term
            if term < KOLMOGOROV_TOL * total or term == 0.0:
                break
        return min(1.0, math.sqrt(2.0 * math.pi) / t * total)
    for j in range(1, KOLMOGOROV_MAX_TERMS + 1):
        term = math.exp(-2.0 * j * j * t * t)
        total += term if j % 2 else -term
        if term < KOLMOGOROV_TOL:
            break
    return min(1.0, max(0.0, 1.0 - 2.0 * total))


def kolmogorov_sf(t: float) -> float:
    return 1.0 - kolmogorov_cdf(t)


def cusum_test(y, theta_hat) -> CusumResult:
    """AMOC mean-change test of ``y``; ``theta_hat`` supplies the variance estimate.

    The supremum runs over ``k = 1..n-1``; ties go to the smallest ``k``. A zero
    residual variance gives ``statistic = 0`` and ``p_value = 1``.
    """
    y = as_float_array(y)
    proc = np.abs(cusum_process(y)[:-1])
    sigma2 = long_run_variance(y, theta_hat)
    k = int(np.argmax(proc)) + 1
    if sigma2 <= 0.0:
        return CusumResult(0.0, 1.0, k, 0.0)
    sigma = math.sqrt(sigma2)
    stat = float(proc[k - 1] / sigma)
    return CusumResult(stat, kolmogorov_sf(stat), k, sigma)
