"""Monte Carlo replicate runner and runtime benchmark."""

from __future__ import annotations

import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .detector import DetectorConfig, detect
from .metrics import log1p_error, summarize
from .simulation import Family, Scenario, generate_series, sample_scenario, scenario_from_dict

REPLICATE_FIELDS = ("replicate", "annotation_error", "energy_error", "log1p_annotation",
                    "log1p_energy", "n_true", "n_detected", "runtime_ms")


@dataclass(frozen=True)
class ReplicateResult:
    replicate: int
    true_changepoints: tuple
    detected: tuple
    annotation_error: int
    energy_error: Optional[float]
    runtime_ms: float
    report: object = None

    def row(self, timing: bool = True) -> dict:
        return {
            "replicate": self.replicate,
            "annotation_error": self.annotation_error,
            "energy_error": self.energy_error,
            "log1p_annotation": log1p_error(self.annotation_error),
            "log1p_energy": log1p_error(self.energy_error),
            "n_true": len(self.true_changepoints),
            "n_detected": len(self.detected),
            "runtime_ms": round(self.runtime_ms, 3) if timing else None,
        }


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("FCPD_THREADS", "1")))
    except ValueError:
        return 1


def replicate_seeds(seed: int, replicates: int) -> list:
    return np.random.SeedSequence(seed).spawn(replicates)


def run_replicate(index: int, scenario, seed_seq, config: Optional[DetectorConfig] = None,
                  keep_report: bool = False) -> ReplicateResult:
    """One replicate: draw a scenario (if given as a mapping), simulate, detect, score."""
    rng = np.random.default_rng(seed_seq)
    if not isinstance(scenario, Scenario):
        scenario = scenario_from_dict(scenario, rng)
    series, truth = generate_series(scenario, rng)
    start = time.perf_counter()
    report = detect(series, config)
    elapsed = (time.perf_counter() - start) * 1000.0
    err = summarize(report.changepoints, truth)
    return ReplicateResult(index, tuple(truth), tuple(report.changepoints), err.annotation,
                           err.energy, elapsed, report if keep_report else None)


def _run_one(args):
    return run_replicate(*args)


def run_study(scenario, replicates: int, seed: int = 0, config: Optional[DetectorConfig] = None,
              workers: Optional[int] = None, keep_report: bool = False) -> list:
    """Run ``replicates`` independent replicates; results are ordered by index."""
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    seeds = replicate_seeds(seed, replicates)
    jobs = [(i, scenario, s, config, keep_report) for i, s in enumerate(seeds)]
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))


def summarize_study(results) -> dict:
    """Mean and median of each error column; missing energy values are skipped and counted."""
    ann = [r.annotation_error for r in results]
    energy = [r.energy_error for r in results if r.energy_error is not None]
    out = {}
    for name, agg in (("mean", statistics.fmean), ("median", statistics.median)):
        out[name] = {
            "annotation_error": agg(ann),
            "energy_error": agg(energy) if energy else None,
            "n_detected": agg([len(r.detected) for r in results]),
        }
    out["energy_missing"] = len(results) - len(energy)
    return out


def bench(sizes, replicates: int = 100, seed: int = 0, m: int = 50,
          config: Optional[DetectorConfig] = None) -> list:
    """Median wall-clock milliseconds of :func:`detect` on fresh null GP data.

    Sizes are visited round-robin within each replicate so that slow drift in
    machine speed is spread evenly over the ladder instead of bending it.
    Returns ``[(n, median_ms), ...]`` in the order of ``sizes``.
    """
    sizes = [int(n) for n in sizes]
    if any(n < 100 for n in sizes):
        raise ValueError(f"benchmark sizes must be >= 100, got {min(sizes)}")
    # warm the JIT so the first size is not charged for compilation
    warm, _ = generate_series(sample_scenario("none", n=100, m=m, transform="identity"))
    detect(warm, config)
    scenarios = [sample_scenario("none", family=Family.GP, n=n, m=m, transform="identity") for n in sizes]
    seeds = [np.random.SeedSequence([seed, i]).spawn(replicates) for i in range(len(sizes))]
    times = [[] for _ in sizes]
    for r in range(replicates):
        for i, scenario in enumerate(scenarios):
            series, _ = generate_series(scenario, np.random.default_rng(seeds[i][r]))
            start = time.perf_counter()
            detect(series, config)
            times[i].append((time.perf_counter() - start) * 1000.0)
    return [(n, statistics.median(t)) for n, t in zip(sizes, times)]
