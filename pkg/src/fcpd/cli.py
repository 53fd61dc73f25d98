"""Command-line interface: ``fcpd detect|simulate|tune|bench``.

Exit status: 0 success, 1 usage error, 2 data error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from .core import DataError, DegenerateCovarianceError, Source, emit_report, load_csv
from .detector import DEFAULT_ALPHA, DetectorConfig, detect
from .projections import fpc1_projection, tvn_projection
from .simulation import scenario_from_dict
from .study import REPLICATE_FIELDS, bench, run_study, summarize_study
from .tuning import TuningGrid, grid_search

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("fcpd")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(fields, rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if v is None else v for k, v in row.items()})
    return buf.getvalue()


def _alpha(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def _add_grid_flags(p):
    p.add_argument("--grid-min", type=float, default=0.2, help="smallest r and k multiplier")
    p.add_argument("--grid-max", type=float, default=5.0, help="largest r and k multiplier")
    p.add_argument("--grid-step", type=float, default=0.1, help="multiplier increment")


def _grid(args) -> TuningGrid:
    if args.grid_step <= 0 or args.grid_min <= 0 or args.grid_max < args.grid_min:
        raise UsageError("grid flags need 0 < grid-min <= grid-max and grid-step > 0")
    return TuningGrid.from_range(args.grid_min, args.grid_max, args.grid_step)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fcpd", description="Multiple changepoint detection for functional time series")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("detect", help="detect changepoints in a CSV series")
    p.add_argument("input", type=Path, help="CSV, rows = time, columns = grid points")
    p.add_argument("--out", type=Path, required=True, help="JSON report path")
    p.add_argument("--header", action="store_true", help="first row holds s=<value> grid cells")
    p.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA)
    p.add_argument("--lambda", dest="lam", type=float, help="fixed fused-lasso penalty (both projections)")
    p.add_argument("--c", type=_positive_int, help="fixed linkage (both projections)")
    _add_grid_flags(p)

    p = sub.add_parser("tune", help="report the BIC-selected (lambda, c) per projection")
    p.add_argument("input", type=Path)
    p.add_argument("--out", type=Path, required=True, help="JSON output path")
    p.add_argument("--table", type=Path, help="optional CSV of every grid evaluation")
    p.add_argument("--header", action="store_true")
    p.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA)
    _add_grid_flags(p)

    p = sub.add_parser("simulate", help="run a simulation study from a scenario file")
    p.add_argument("scenario", type=Path, help="scenario JSON")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--replicates", type=_positive_int, help="overrides the scenario file")
    p.add_argument("--seed", type=int, help="overrides the scenario file")
    p.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA)
    p.add_argument("--no-timing", action="store_true", help="leave runtime_ms blank for byte-stable output")
    _add_grid_flags(p)

    p = sub.add_parser("bench", help="median detect runtime across sample sizes")
    p.add_argument("--sizes", default="1000,2000,3000,4000,5000,6000,7000",
                   help="comma-separated sample sizes")
    p.add_argument("--replicates", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="CSV path")
    return parser


def cmd_detect(args) -> int:
    series = load_csv(args.input, has_header=args.header)
    overrides = {}
    if (args.lam is None) != (args.c is None):
        raise UsageError("--lambda and --c must be given together")
    if args.lam is not None:
        if args.lam <= 0:
            raise UsageError("--lambda must be positive")
        overrides = {Source.TVN: (args.lam, args.c), Source.FPC1: (args.lam, args.c)}
    config = DetectorConfig(alpha=args.alpha, grid=_grid(args), fixed_lambda_c=overrides)
    report = detect(series, config)
    report.check(series.n)
    atomic_write(args.out, emit_report(report))
    log.info("%d changepoints written to %s", len(report.changepoints), args.out)
    return EXIT_OK


def cmd_tune(args) -> int:
    series = load_csv(args.input, has_header=args.header)
    grid = _grid(args)
    projections = {Source.TVN: tvn_projection(series)}
    try:
        projections[Source.FPC1] = fpc1_projection(series)
    except DegenerateCovarianceError:
        projections[Source.FPC1] = None
    summary, table = {}, []
    for src, proj in projections.items():
        if proj is None:
            summary[src.value] = None
            continue
        res = grid_search(proj.values, grid, args.alpha, keep_evaluations=args.table is not None)
        summary[src.value] = {"lambda": res.lam, "c": res.c, "bic": res.bic,
                              "changepoints": list(res.changepoints)}
        table += [{"projection": src.value, "lambda": e.lam, "c": e.c, "bic": e.bic,
                   "n_changepoints": len(e.changepoints)} for e in res.evaluations]
    atomic_write(args.out, json.dumps({"alpha": args.alpha, "tuned": summary},
                                      indent=2, sort_keys=True) + "\n")
    if args.table is not None:
        atomic_write(args.table, _csv_text(("projection", "lambda", "c", "bic", "n_changepoints"), table))
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        spec = json.loads(args.scenario.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read scenario {args.scenario}: {exc}") from None
    if not isinstance(spec, dict):
        raise DataError("scenario file must hold a JSON object")
    replicates = args.replicates if args.replicates is not None else int(spec.get("replicates", 1))
    seed = args.seed if args.seed is not None else int(spec.get("seed", 0))
    if replicates < 1:
        raise DataError("replicates must be >= 1")
    config = DetectorConfig(alpha=args.alpha, grid=_grid(args))
    try:
        scenario_from_dict(spec)
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f"invalid scenario: {exc}") from None
    results = run_study(spec, replicates, seed, config)
    rows = [r.row(timing=not args.no_timing) for r in results]
    summary = summarize_study(results)
    summary_rows = [{"statistic": k, **v} for k, v in summary.items() if isinstance(v, dict)]
    summary_rows.append({"statistic": "energy_missing", "annotation_error": None,
                         "energy_error": summary["energy_missing"], "n_detected": None})
    atomic_write(args.out / "replicates.csv", _csv_text(REPLICATE_FIELDS, rows))
    atomic_write(args.out / "summary.csv",
                 _csv_text(("statistic", "annotation_error", "energy_error", "n_detected"), summary_rows))
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad --sizes {args.sizes!r}") from None
    if not sizes or min(sizes) < 100:
        raise UsageError("--sizes must list integers >= 100")
    rows = bench(sizes, args.replicates, args.seed)
    atomic_write(args.out, _csv_text(("n", "median_ms"), [{"n": n, "median_ms": round(t, 3)} for n, t in rows]))
    return EXIT_OK


COMMANDS = {"detect": cmd_detect, "tune": cmd_tune, "simulate": cmd_simulate, "bench": cmd_bench}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"fcpd: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"fcpd: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"fcpd: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AssertionError as exc:
        print(f"fcpd: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
