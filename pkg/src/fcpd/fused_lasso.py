"""Exact 1-D fused lasso (total variation denoising).

Minimizes ``||y - theta||^2 + lam * sum_t |theta_{t+1} - theta_t|`` with
Condat's direct algorithm. Note the SSE term carries no 1/2 factor, so the
taut-string threshold applied internally is ``lam / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .core import DataError, as_float_array


@dataclass(frozen=True)
class PiecewiseFit:
    theta: np.ndarray
    lam: float


@numba.njit(cache=True)
def _condat(y, lam):
    n = y.shape[0]
    x = np.empty(n)
    if n == 0:
        return x
    k = 0
    k0 = 0
    kplus = 0
    kminus = 0
    minlam = -lam
    twolam = 2.0 * lam
    umin = lam
    umax = minlam
    vmin = y[0] - lam
    vmax = y[0] + lam
    while True:
        while k == n - 1:
            if umin < 0.0:
                while True:
                    x[k0] = vmin
                    k0 += 1
                    if k0 > kminus:
                        break
                k = k0
                kminus = k0
                vmin = y[k0]
                umin = lam
                umax = vmin + umin - vmax
            elif umax > 0.0:
                while True:
                    x[k0] = vmax
                    k0 += 1
                    if k0 > kplus:
                        break
                k = k0
                kplus = k0
                vmax = y[k0]
                umax = minlam
                umin = vmax + umax - vmin
            else:
                vmin += umin / (k - k0 + 1)
                while True:
                    x[k0] = vmin
                    k0 += 1
                    if k0 > k:
                        break
                return x
        umin += y[k + 1] - vmin
        if umin < minlam:
            while True:
                x[k0] = vmin
                k0 += 1
                if k0 > kminus:
                    break
            k = k0
            kminus = k0
            kplus = k0
            vmin = y[k0]
            vmax = vmin + twolam
            umin = lam
            umax = minlam
            continue
        umax += y[k + 1] - vmax
        if umax > lam:
            while True:
                x[k0] = vmax
                k0 += 1
                if k0 > kplus:
                    break
            k = k0
            kminus = k0
            kplus = k0
            vmax = y[k0]
            vmin = vmax - twolam
            umin = lam
            umax = minlam
            continue
        k += 1
        if umin >= lam:
            kminus = k
            vmin += (umin - lam) / (kminus - k0 + 1)
            umin = lam
        if umax <= minlam:
            kplus = k
            vmax += (umax + lam) / (kplus - k0 + 1)
            umax = minlam


def objective(y, theta, lam: float) -> float:
    y = np.asarray(y, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return float(np.sum((y - theta) ** 2) + lam * np.sum(np.abs(np.diff(theta))))


def tv_denoise(y, lam: float) -> PiecewiseFit:
    """Global minimizer of ``||y - theta||^2 + lam * TV(theta)``."""
    y = as_float_array(y)
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0:
        raise DataError(f"lambda must be finite and >= 0, got {lam}")
    if lam == 0.0 or y.size <= 1:
        theta = y.copy()
    else:
        # center first: the solution is shift-equivariant and this keeps the
        # running sums well scaled
        mu = y.mean()
        theta = _condat(y - mu, lam / 2.0) + mu
    theta.setflags(write=False)
    return PiecewiseFit(theta, lam)


def default_jump_tol(y) -> float:
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        return 0.0
    return 1e-9 * float(np.max(y) - np.min(y))


def jump_set(fit: PiecewiseFit, tol: float | None = None) -> np.ndarray:
    """1-based indices ``t`` with ``|theta_{t+1} - theta_t| > tol``."""
    theta = fit.theta
    if tol is None:
        tol = default_jump_tol(theta)
    return np.flatnonzero(np.abs(np.diff(theta)) > tol) + 1
