"""Command-line pipeline for the adsorbed-gas estimation workflow.

Subcommands mirror the pipeline stages: ``clean``, ``outliers``, ``fit`` and
``validate`` each run the chain up to their stage; ``compare`` scores the
geological-parameter model against the reference forms; ``estimate``
evaluates reservoirs; ``idw`` interpolates temperature gradients. All
randomness flows from ``--seed``; diagnostics go to stderr and data to
files, so runs are reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from pathlib import Path

from . import dataset, estimator, geotemp, outliers, validation
from .dataset import DatasetKind
from .regression import FittedModel, ModelKind, ModelSpec, fit as fit_model, model_from_text, model_to_text
from .validation import Scenario

LOG_ENV_VAR = "SHALE_ADSORB_LOG"

log = logging.getLogger("shale_adsorb")

_COMPARE_SPECS = {
    DatasetKind.PL: (ModelKind.PL_INVTEMP, ModelKind.PL_TOCPOW, ModelKind.PL_GEO),
    DatasetKind.VL: (ModelKind.VL_TOCPOW, ModelKind.VL_TOCLIN, ModelKind.VL_GEO),
}

_GEO_KIND = {DatasetKind.PL: ModelKind.PL_GEO, DatasetKind.VL: ModelKind.VL_GEO}


def _configure_logging() -> None:
    level_name = os.environ.get(LOG_ENV_VAR, "warning").strip().lower()
    levels = {"debug": logging.DEBUG, "info": logging.INFO,
              "warning": logging.WARNING, "error": logging.ERROR}
    logging.basicConfig(
        stream=sys.stderr,
        level=levels.get(level_name, logging.WARNING),
        format="%(name)s %(levelname)s: %(message)s",
    )


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, content: str) -> None:
    path.write_text(content, encoding="utf-8")
    log.info("wrote %s", path)


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _stage(name: str, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except ValueError as exc:
        raise ValueError(f"{name} stage: {exc}") from exc


def _run_clean_stage(args: argparse.Namespace, out: Path) -> list[dataset.SampleRecord]:
    kind = DatasetKind(args.kind)
    records = _stage("parse", dataset.parse_samples, _read_text(args.input))
    unique, duplicates = dataset.integrate_replicates(records)
    outcome = _stage("clean", dataset.clean, unique, kind)

    _write(out / "kept.csv", dataset.records_to_csv(outcome.kept))
    rejection_rows = [(rec, dataset.REASON_DUPLICATE) for rec in duplicates] + outcome.rejected
    _write(out / "rejections.csv", dataset.rejections_to_csv(rejection_rows))

    _say(f"clean[{kind.value}]: kept {len(outcome.kept)}, rejected "
         f"{len(outcome.rejected) + len(duplicates)} ({len(duplicates)} duplicate)")
    return outcome.kept


def _run_outlier_stage(args: argparse.Namespace, out: Path) -> list[dataset.SampleRecord]:
    kind = DatasetKind(args.kind)
    kept = _run_clean_stage(args, out)
    report = _stage("outlier-detection", outliers.detect_outliers, kept, kind,
                    k=args.k, threshold=args.threshold)
    _write(out / "outliers.csv", report.to_csv())
    inlier_records = report.inliers(kept)
    _say(f"outliers[{kind.value}]: flagged {len(kept) - len(inlier_records)} of {len(kept)} "
         f"(k={args.k}, threshold={args.threshold})")
    return inlier_records


def _run_fit_stage(args: argparse.Namespace, out: Path) -> tuple[FittedModel, list[dataset.SampleRecord]]:
    kind = DatasetKind(args.kind)
    records = _run_outlier_stage(args, out)
    spec = ModelSpec(_GEO_KIND[kind])
    model = _stage("fit", fit_model, records, spec)
    _write(out / f"model_{kind.value}.txt", model_to_text(model))
    coefficients = ", ".join(
        f"{name}={value:.4g}" for name, value in zip(spec.coefficient_names, model.coefficients)
    )
    _say(f"fit[{spec.kind.value}]: {coefficients} (n_fit={model.n_fit})")
    return model, records


def cmd_clean(args: argparse.Namespace) -> int:
    _run_clean_stage(args, _out_dir(args))
    return 0


def cmd_outliers(args: argparse.Namespace) -> int:
    _run_outlier_stage(args, _out_dir(args))
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    _run_fit_stage(args, _out_dir(args))
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    model, records = _run_fit_stage(args, out)
    report = _stage("leave-one-out", validation.loo_cv, records, model.spec, ci_level=args.ci_level)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "error_pct"])
    for rec, error in zip(records, report.errors_pct):
        writer.writerow([rec.id, repr(error)])
    _write(out / "loo_errors.csv", buf.getvalue())

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["expected", "observed"])
    for expected, observed in report.qq_pairs:
        writer.writerow([repr(expected), repr(observed)])
    _write(out / "qq.csv", buf.getvalue())

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["stat", "value"])
    for name in ("mean_error_pct", "ci_half_width_pct", "abs_mean_error_pct",
                 "abs_ci_half_width_pct", "ci_level", "n"):
        writer.writerow([name, repr(getattr(report, name))])
    _write(out / "validation_summary.csv", buf.getvalue())

    _say(f"validate: mean error {report.mean_error_pct:.2f}% "
         f"(+/- {report.ci_half_width_pct:.2f}%), mean |error| {report.abs_mean_error_pct:.2f}% "
         f"(+/- {report.abs_ci_half_width_pct:.2f}%), {args.ci_level:.0%} CI, n={report.n}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    kind = DatasetKind(args.kind)
    records = _run_outlier_stage(args, out)
    specs = [
        ModelSpec(model_kind, invtemp_kelvin=args.invtemp_kelvin)
        for model_kind in _COMPARE_SPECS[kind]
    ]
    table = _stage("compare", validation.compare_models, records, specs,
                   scenario=Scenario(args.scenario), test_fraction=args.test_fraction,
                   repetitions=args.reps, seed=args.seed)
    _write(out / "comparison.csv", table.to_csv())
    for model, error in table.averages().items():
        _say(f"compare[{args.scenario}]: {model} average error {error:.2f}%")
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    if args.paper_coefficients:
        if args.pl_model or args.vl_model:
            raise ValueError("--paper-coefficients cannot be combined with --pl-model/--vl-model")
        pl_model, vl_model = estimator.reference_models()
    else:
        if not (args.pl_model and args.vl_model):
            raise ValueError("estimate needs --paper-coefficients or both --pl-model and --vl-model")
        pl_model = model_from_text(_read_text(args.pl_model))
        vl_model = model_from_text(_read_text(args.vl_model))
        if pl_model.spec.dependent_var != "pl" or vl_model.spec.dependent_var != "vl":
            raise ValueError("--pl-model must predict pl and --vl-model must predict vl")

    specs = _stage("reservoir-config", estimator.parse_reservoirs, _read_text(args.input))
    if not specs:
        raise ValueError(f"no reservoir blocks found in {args.input}")
    rows = [_stage("estimate", estimator.estimate_reservoir, spec, pl_model, vl_model)
            for spec in specs]
    _write(out / "estimates.csv", estimator.estimates_to_csv(rows))
    for row in rows:
        if row.warnings:
            _say(f"warning: {row.reservoir}: outside fitted ranges ({';'.join(row.warnings)})")
    _say(f"estimate: wrote {len(rows)} reservoirs to {out / 'estimates.csv'}")
    return 0


def cmd_idw(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    points = _stage("parse", geotemp.parse_heatflow, _read_text(args.input))
    usable = geotemp.filter_heatflow(points, min_depth=args.min_depth)
    if not usable:
        raise ValueError(f"no heat-flow points at or below {args.min_depth} m")
    _say(f"idw: {len(usable)} of {len(points)} points usable (min depth {args.min_depth} m)")

    if args.query is not None:
        lon, lat = args.query
        value = _stage("interpolate", geotemp.idw_interpolate, usable, lon, lat,
                       power=args.idw_power, max_neighbors=args.max_neighbors)
        rows = [(lon, lat, value)]
        _say(f"idw: gradient at ({lon:.4f}, {lat:.4f}) is {value:.2f} degC/km")
    else:
        lon_min, lon_max, lat_min, lat_max, n_lon, n_lat = args.grid
        rows = _stage("interpolate", geotemp.interpolate_grid, usable,
                      lon_min, lon_max, lat_min, lat_max, int(n_lon), int(n_lat),
                      power=args.idw_power, max_neighbors=args.max_neighbors)
    _write(out / "idw.csv", geotemp.grid_to_csv(rows))
    return 0


def _add_io_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="input file path")
    parser.add_argument("--output-dir", default=".", help="directory for output files")


def _add_kind_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kind", required=True, choices=["pl", "vl"],
                        help="which dependent variable's dataset to process")


def _add_outlier_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=outliers.DEFAULT_K,
                        help="neighbour count for outlier screening (default 5)")
    parser.add_argument("--threshold", type=float, default=outliers.DEFAULT_THRESHOLD,
                        help="weighted-relative-error outlier threshold (default 0.85)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shale-adsorb",
        description="Estimate adsorbed shale-gas content from geological parameters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clean", help="apply the range filters and write kept/rejected records")
    _add_io_options(p)
    _add_kind_option(p)
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("outliers", help="clean, then flag K-NN outliers")
    _add_io_options(p)
    _add_kind_option(p)
    _add_outlier_options(p)
    p.set_defaults(func=cmd_outliers)

    p = sub.add_parser("fit", help="clean, drop outliers, and fit the geological-parameter model")
    _add_io_options(p)
    _add_kind_option(p)
    _add_outlier_options(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("validate", help="full pipeline through leave-one-out validation")
    _add_io_options(p)
    _add_kind_option(p)
    _add_outlier_options(p)
    p.add_argument("--ci-level", type=float, default=validation.DEFAULT_CI_LEVEL,
                   help="confidence level for error intervals (default 0.90)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compare", help="score the model against the reference forms on random splits")
    _add_io_options(p)
    _add_kind_option(p)
    _add_outlier_options(p)
    p.add_argument("--scenario", default="overall",
                   choices=[s.value for s in Scenario],
                   help="test-pool restriction (default overall)")
    p.add_argument("--test-fraction", type=float, default=0.2,
                   help="fraction of all records used as test data (default 0.2)")
    p.add_argument("--reps", type=int, default=5, help="number of repetitions (default 5)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--invtemp-kelvin", action="store_true",
                   help="use absolute temperature in the reciprocal-temperature reference model")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("estimate", help="estimate adsorbed content for configured reservoirs")
    _add_io_options(p)
    p.add_argument("--paper-coefficients", action="store_true",
                   help="use the built-in reference coefficients instead of model files")
    p.add_argument("--pl-model", help="path to a fitted pressure-model file")
    p.add_argument("--vl-model", help="path to a fitted volume-model file")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("idw", help="interpolate temperature gradient from heat-flow data")
    _add_io_options(p)
    p.add_argument("--min-depth", type=float, default=geotemp.DEFAULT_MIN_SECTION_DEPTH_M,
                   help="minimum measuring-section depth in meters (default 500)")
    p.add_argument("--idw-power", type=float, default=geotemp.DEFAULT_IDW_POWER,
                   help="inverse-distance exponent (default 2)")
    p.add_argument("--max-neighbors", type=int, default=None,
                   help="optionally cap interpolation to the N nearest samples")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--query", nargs=2, type=float, metavar=("LON", "LAT"),
                       help="interpolate at a single lon/lat point")
    group.add_argument("--grid", nargs=6, type=float,
                       metavar=("LONMIN", "LONMAX", "LATMIN", "LATMAX", "NLON", "NLAT"),
                       help="interpolate on an inclusive regular grid")
    p.set_defaults(func=cmd_idw)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging()
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        _say(f"error: file not found: {exc.filename or exc}")
        return 2
    except (ValueError, OSError) as exc:
        _say(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
