"""Changeset regionalization, region-wise CUSUM and FDR control."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .core import DataError, Region, RegionCandidate, as_float_array
from .cusum import kolmogorov_sf


@dataclass(frozen=True)
class ChangesetPartition:
    changesets: tuple
    linkage: int

    def __len__(self):
        return len(self.changesets)


def agglomerate(jumps: Iterable[int], c: int) -> ChangesetPartition:
    """Group sorted jump indices, splitting wherever the gap exceeds ``c``.

    >>> agglomerate([1, 2, 5], 2).changesets
    ((1, 2), (5,))
    """
    c = int(c)
    if c < 1:
        raise ValueError(f"linkage c must be >= 1, got {c}")
    jumps = sorted(int(j) for j in jumps)
    groups = []
    for j in jumps:
        if groups and j - groups[-1][-1] <= c:
            groups[-1].append(j)
        else:
            groups.append([j])
    return ChangesetPartition(tuple(tuple(g) for g in groups), c)


def build_regions(partition: ChangesetPartition, n: int) -> list:
    """Region ``j`` spans ``[max(b_{j-1}) + 1, min(b_{j+1}) - 1]``.

    An empty partition yields the single region ``[1, n]``.
    """
    sets = partition.changesets
    if not sets:
        return [Region(1, n, 0)]
    if sets[-1][-1] >= n:
        raise ValueError(f"changeset element {sets[-1][-1]} not below n = {n}")
    regions = []
    for j in range(len(sets)):
        lo = sets[j - 1][-1] + 1 if j > 0 else 1
        hi = sets[j + 1][0] - 1 if j + 1 < len(sets) else n
        regions.append(Region(lo, hi, j))
    return regions


def _segment_ids(lengths: np.ndarray) -> np.ndarray:
    return np.repeat(np.arange(lengths.size), lengths)


def detect_in_regions(y, theta_hat, regions: Sequence[Region]) -> list:
    """CUSUM test on each region's restriction of ``y`` and ``theta_hat``.

    All regions are handled in one vectorized pass; the result matches
    :func:`fcpd.cusum.cusum_test` applied region by region, with locations in
    global 1-based coordinates.
    """
    y = as_float_array(y)
    theta_hat = as_float_array(theta_hat, "theta_hat")
    if y.shape != theta_hat.shape:
        raise DataError("y and theta_hat must have equal length")
    if not regions:
        return []
    lo = np.array([r.lo for r in regions], dtype=np.int64)
    hi = np.array([r.hi for r in regions], dtype=np.int64)
    if np.any(lo < 1) or np.any(hi > y.size) or np.any(hi - lo < 1):
        raise DataError("region bounds invalid for series length")
    lengths = hi - lo + 1
    starts = lo - 1
    offsets = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    seg = _segment_ids(lengths)
    idx = np.arange(lengths.sum()) - offsets[seg] + starts[seg]

    # centered partial sums of y inside each region
    yy = y[idx]
    mean = np.add.reduceat(yy, offsets) / lengths
    partial = np.cumsum(yy - mean[seg])
    base = np.concatenate(([0.0], partial[offsets[1:] - 1]))
    proc = np.abs(partial - base[seg]) / np.sqrt(lengths)[seg]

    # residual variance, two-pass so constant residuals give exactly zero
    res = yy - theta_hat[idx]
    rmean = np.add.reduceat(res, offsets) / lengths
    ss = np.add.reduceat((res - rmean[seg]) ** 2, offsets)
    var = ss / (lengths - 1)

    # supremum over k = 1..L-1: drop the last (always ~zero) entry per region
    keep = np.ones(proc.size, dtype=bool)
    keep[offsets + lengths - 1] = False
    proc_k = proc[keep]
    seg_k = seg[keep]
    off_k = offsets - np.arange(lengths.size)
    peak = np.maximum.reduceat(proc_k, off_k)
    first = np.flatnonzero(proc_k == peak[seg_k])
    argk = first[np.searchsorted(seg_k[first], np.arange(lengths.size))] - off_k + 1

    out = []
    for i, region in enumerate(regions):
        location = int(lo[i] - 1 + argk[i])
        if var[i] <= 0.0:
            out.append(RegionCandidate(region, location, 0.0, 1.0))
            continue
        stat = float(peak[i] / math.sqrt(var[i]))
        out.append(RegionCandidate(region, location, stat, kolmogorov_sf(stat)))
    return out


def bh_adjust(pvals) -> np.ndarray:
    """Benjamini-Hochberg step-up adjusted p-values, in input order."""
    p = np.asarray(pvals, dtype=float).ravel()
    m = p.size
    if m == 0:
        return p.copy()
    if np.any((p < 0) | (p > 1)) or not np.all(np.isfinite(p)):
        raise ValueError("p-values must lie in [0, 1]")
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    adj_sorted = np.minimum.accumulate(scaled[::-1])[::-1]
    adj = np.empty(m)
    adj[order] = np.minimum(adj_sorted, 1.0)
    return np.maximum(adj, p)


def adjust_candidates(candidates: Sequence[RegionCandidate]) -> list:
    adj = bh_adjust([c.raw_p for c in candidates])
    return [replace(c, adjusted_p=float(a)) for c, a in zip(candidates, adj)]


def significant_locations(candidates: Sequence[RegionCandidate], alpha: float) -> list:
    """Sorted unique locations of candidates with ``adjusted_p <= alpha``."""
    return sorted({c.location for c in candidates if c.adjusted_p <= alpha})


def finalize(candidates_tvn, candidates_fpc1, alpha: float) -> list:
    """Merge significant candidates from both projections; sort; drop exact repeats."""
    for c in list(candidates_tvn) + list(candidates_fpc1):
        if c.adjusted_p is None:
            raise ValueError("candidates must carry adjusted p-values")
    return significant_locations(list(candidates_tvn) + list(candidates_fpc1), alpha)
