"""End-to-end multiple changepoint isolation on a functional series."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .core import ChangepointReport, DegenerateCovarianceError, FunctionalSeries, Source
from .fused_lasso import default_jump_tol, jump_set, tv_denoise
from .projections import fpc1_projection, tvn_projection
from .regions import agglomerate, finalize
from .tuning import TuningGrid, grid_search, projection_changepoints

log = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.001


@dataclass(frozen=True)
class DetectorConfig:
    """Detection settings.

    ``fixed_lambda_c`` maps a :class:`Source` to a ``(lam, c)`` pair that
    replaces the BIC search for that projection.
    """

    alpha: float = DEFAULT_ALPHA
    grid: TuningGrid = field(default_factory=TuningGrid)
    fixed_lambda_c: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        fixed = {}
        for src, (lam, c) in dict(self.fixed_lambda_c).items():
            if not lam > 0 or int(c) < 1:
                raise ValueError(f"override for {src} must have lam > 0 and c >= 1")
            fixed[Source(src)] = (float(lam), int(c))
        object.__setattr__(self, "fixed_lambda_c", fixed)


def detect_projection(y, config: DetectorConfig, source: Source):
    """Tune (or take the override for) one projection and return its candidates."""
    if source in config.fixed_lambda_c:
        lam, c = config.fixed_lambda_c[source]
    else:
        best = grid_search(y, config.grid, config.alpha)
        lam, c = best.lam, best.c
    fit = tv_denoise(y, lam)
    jumps = jump_set(fit, default_jump_tol(y))
    cands, _ = projection_changepoints(y, fit.theta, agglomerate(jumps, c), config.alpha)
    return cands, (lam, c)


def detect(series: FunctionalSeries, config: Optional[DetectorConfig] = None) -> ChangepointReport:
    """Detect mean and covariance changepoints in ``series``.

    Both projections are tuned independently; their significant candidates
    are merged into one sorted, duplicate-free list. A series whose covariance
    vanishes is analysed through the TVN projection alone and flagged in
    ``diagnostics``.
    """
    config = config or DetectorConfig()
    per_projection = {}
    tuned = {}
    diagnostics = []
    projected = {Source.TVN: tvn_projection(series)}
    try:
        projected[Source.FPC1] = fpc1_projection(series)
    except DegenerateCovarianceError:
        log.warning("degenerate covariance; skipping the FPC1 projection")
        diagnostics.append("degenerate_covariance")
        per_projection[Source.FPC1] = []
        tuned[Source.FPC1] = None
    for source, proj in projected.items():
        cands, pair = detect_projection(proj.values, config, source)
        per_projection[source] = cands
        tuned[source] = pair
    changepoints = finalize(per_projection[Source.TVN], per_projection[Source.FPC1], config.alpha)
    return ChangepointReport(
        changepoints=tuple(changepoints),
        per_projection=per_projection,
        tuned=tuned,
        alpha=config.alpha,
        diagnostics=tuple(diagnostics),
    )
