"""
Command-line interface for the ULINF toolkit
Fitting, comparison, simulation, sampling and data generation.
"""

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ValidationError

from ulinf import __version__, config, data_io
from ulinf.competitors import beinf_fit, zoik_fit
from ulinf.errors import UlinfError
from ulinf.inference import fit_ulinf, partition
from ulinf.inflated_mixture import density_table, ulinf_sample
from ulinf.model_selection import cdf_distances, compare, ecdf_and_fitted_cdfs, histogram_table
from ulinf.models import (
    CdfGridRow,
    ComparisonReport,
    DatasetSummary,
    DensityTable,
    FitResult,
    HistogramBin,
    SamplingMode,
    SimDesign,
    UlinfParams,
)
from ulinf.simulation import report_to_csv, report_to_text, run_simulation

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

FITTERS: Dict[str, Callable[..., FitResult]] = {
    "ulinf": fit_ulinf,
    "beinf": beinf_fit,
    "zoik": zoik_fit,
}

# alpha, p, theta used when no truth is given
DEFAULT_TRUTH = (0.25, 0.4, 1.5)


# ---------------------------------------------------------------------------
# Argument types
# ---------------------------------------------------------------------------

def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return value


def _level(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"level must lie in (0, 1), got {text}")
    return value


def _count(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative count, got {text}")
    return value


def _positive(text: str) -> int:
    value = _count(text)
    if value == 0:
        raise argparse.ArgumentTypeError(f"expected a positive count, got {text}")
    return value


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _num(value: Optional[float]) -> str:
    return "NA" if value is None else f"{value:.10g}"


def _json(payload) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    return json.dumps(payload, indent=2) + "\n"


def _csv(rows: Sequence[Sequence[object]]) -> str:
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerows(rows)
    return buffer.getvalue()


def _fit_rows(fit: FitResult) -> List[List[str]]:
    rows = []
    for name, estimate in fit.estimates.items():
        interval = fit.conf_intervals.get(name)
        lo, hi = interval if interval is not None else (None, None)
        rows.append([name, _num(estimate), _num(fit.std_errors.get(name)), _num(lo), _num(hi)])
    for name, value in fit.derived.items():
        interval = fit.derived_conf_intervals.get(name)
        lo, hi = interval if interval is not None else (None, None)
        rows.append([name, _num(value), _num(fit.derived_std_errors.get(name)), _num(lo), _num(hi)])
    return rows


def render_fit(fit: FitResult, fmt: str) -> str:
    if fmt == "json":
        return _json(fit)
    header = ["parameter", "estimate", "std_error", "lower", "upper"]
    if fmt == "csv":
        return _csv([header] + _fit_rows(fit))

    lines = [f"{fit.model.value} fit (n={fit.n}, k={fit.k}, level={_num(fit.level)})"]
    table = [header] + _fit_rows(fit)
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines += ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in table]
    lines.append(f"loglik={_num(fit.loglik)}  AIC={_num(fit.aic)}  BIC={_num(fit.bic)}")
    if fit.flags:
        lines.append("flags: " + ", ".join(fit.flags))
    return "\n".join(lines) + "\n"


def _grid_csv(grid: Sequence[CdfGridRow]) -> str:
    header = ["y", "ecdf", "cdf_ulinf", "cdf_beinf", "cdf_zoik"]
    return _csv([header] + [[_num(getattr(row, name)) for name in header] for row in grid])


def render_comparison(report: ComparisonReport, grid: Sequence[CdfGridRow], fmt: str) -> str:
    if fmt == "json":
        payload = report.model_dump(mode="json")
        if grid:
            payload["cdf_grid"] = [row.model_dump(mode="json") for row in grid]
        return _json(payload)

    rank_aic = {model: i + 1 for i, model in enumerate(report.ranking_aic)}
    rank_bic = {model: i + 1 for i, model in enumerate(report.ranking_bic)}
    summary = [["model", "k", "loglik", "aic", "bic", "rank_aic", "rank_bic"]]
    for fit in report.fits:
        summary.append([
            fit.model.value, str(fit.k), _num(fit.loglik), _num(fit.aic), _num(fit.bic),
            str(rank_aic[fit.model]), str(rank_bic[fit.model]),
        ])

    if fmt == "csv":
        text = _csv(summary)
        return text + ("\n" + _grid_csv(grid) if grid else "")

    blocks = [render_fit(fit, "text") for fit in report.fits]
    for model, reason in report.failures.items():
        blocks.append(f"{model.value} fit failed: {reason}\n")
    widths = [max(len(row[i]) for row in summary) for i in range(len(summary[0]))]
    ranking = "\n".join("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in summary)
    best = ", ".join(f"{criterion.upper()}: {model.value}" for criterion, model in report.best.items())
    blocks.append(ranking + "\n" + (f"best by {best}\n" if best else ""))
    if grid:
        blocks.append(_grid_csv(grid))
    return "\n".join(blocks)


def _histogram_csv(bins: Sequence[HistogramBin]) -> str:
    header = ["bin", "lo", "hi", "count", "density"]
    return _csv([header] + [[row.label, _num(row.lo), _num(row.hi), str(row.count), _num(row.density)] for row in bins])


def render_summary(summary: DatasetSummary, fmt: str, histogram: Sequence[HistogramBin] = ()) -> str:
    if fmt == "json":
        payload = summary.model_dump(mode="json")
        if histogram:
            payload["histogram"] = [row.model_dump(mode="json") for row in histogram]
        return _json(payload)
    tail = "\n" + _histogram_csv(histogram) if histogram else ""
    fields = summary.model_dump()
    if fmt == "csv":
        return _csv([list(fields), [value if isinstance(value, str) else _num(value) for value in fields.values()]]) + tail
    width = max(len(name) for name in fields)
    return "".join(
        f"{name.ljust(width)}  {value if isinstance(value, str) else _num(value)}\n" for name, value in fields.items()
    ) + tail


def render_density(table: DensityTable, fmt: str) -> str:
    if fmt == "json":
        return _json(table)
    header = ["y"] + [f"theta={_num(theta)}" for theta in table.thetas]
    rows = [[_num(y)] + [_num(d) for d in row] for y, row in zip(table.y, table.densities)]
    text = _csv([header] + rows)
    if fmt == "csv":
        return text
    return text + f"mass at 0: {_num(table.mass_at_zero)}\nmass at 1: {_num(table.mass_at_one)}\n"


def render_values(values: Sequence[float], fmt: str) -> str:
    if fmt == "json":
        return _json([float(v) for v in values])
    lines = [repr(float(v)) for v in values]
    if fmt == "csv":
        lines = ["y"] + lines
    return "".join(line + "\n" for line in lines)


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    output.write_text(text)
    logger.info("wrote %s", output)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_fit(args: argparse.Namespace) -> int:
    dataset = data_io.load(args.data)
    fit = FITTERS[args.model](partition(dataset.values), args.level)
    _emit(render_fit(fit, args.format), args.output)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    dataset = data_io.load(args.data)
    report = compare(dataset.values, args.level)
    grid: List[CdfGridRow] = []
    if args.cdf_grid:
        grid = ecdf_and_fitted_cdfs(dataset.values, report.fits, args.cdf_grid)
        cdf_distances(grid)
    _emit(render_comparison(report, grid, args.format), args.output)
    return EXIT_OK if report.fits else EXIT_FAILURE


def cmd_simulate(args: argparse.Namespace) -> int:
    design = SimDesign(
        truth=UlinfParams(alpha=args.alpha, p=args.p, theta=args.theta),
        sample_sizes=args.sizes,
        replications=args.reps,
        mode=SamplingMode(args.mode),
        seed=args.seed,
        workers=args.workers,
    )
    report = run_simulation(design)
    if args.format == "json":
        text = _json(report)
    elif args.format == "csv":
        text = report_to_csv(report, args.relative)
    else:
        text = report_to_text(report, args.relative)
    _emit(text, args.output)
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    params = UlinfParams(alpha=args.alpha, p=args.p, theta=args.theta)
    values = ulinf_sample(args.n, params, np.random.default_rng(args.seed), SamplingMode(args.mode))
    _emit(render_values(values, args.format), args.output)
    return EXIT_OK


def cmd_gen_data(args: argparse.Namespace) -> int:
    if args.appendix_b:
        zeros, ones, interior, theta = data_io.SHORT_PSEUDO_LAYOUT
    else:
        zeros, ones, interior, theta = args.zeros, args.ones, args.interior, args.theta
    dataset = data_io.generate_pseudo(args.seed, zeros, ones, interior, theta)
    if args.format == "json":
        _emit(_json(dataset), args.output)
    elif args.output is not None:
        data_io.write(dataset, args.output)
        logger.info("wrote %d rows to %s", len(dataset.values), args.output)
    else:
        _emit(render_values(dataset.values, "csv"), args.output)
    return EXIT_OK


def cmd_describe(args: argparse.Namespace) -> int:
    dataset = data_io.load(args.data)
    histogram = histogram_table(dataset.values, args.bins) if args.bins else []
    _emit(render_summary(data_io.describe(dataset), args.format, histogram), args.output)
    return EXIT_OK


def cmd_density(args: argparse.Namespace) -> int:
    table = density_table(args.alpha, args.p, args.thetas, args.grid)
    _emit(render_density(table, args.format), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=config.DEFAULT_SEED,
                        help=f"random seed (default: {config.DEFAULT_SEED})")
    common.add_argument("--output", type=Path, default=None, help="write to this file instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text", help="output format")
    common.add_argument("--level", type=_level, default=config.DEFAULT_LEVEL,
                        help=f"confidence level (default: {config.DEFAULT_LEVEL})")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logging")
    return common


def _truth(parser: argparse.ArgumentParser) -> None:
    alpha, p, theta = DEFAULT_TRUTH
    parser.add_argument("--alpha", type=float, default=alpha, help=f"mixing weight (default: {alpha})")
    parser.add_argument("--p", type=float, default=p, help=f"probability of a one among endpoints (default: {p})")
    parser.add_argument("--theta", type=float, default=theta, help=f"unit-Lindley shape (default: {theta})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ulinf",
        description="Zero-and-one inflated unit-Lindley toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", metavar="command", required=True)

    fit = commands.add_parser("fit", parents=[_common()], help="fit one model to a dataset")
    fit.add_argument("--data", required=True, help="dataset file or embedded name (elephants)")
    fit.add_argument("--model", choices=sorted(FITTERS), default="ulinf")
    fit.set_defaults(handler=cmd_fit)

    cmp_ = commands.add_parser("compare", parents=[_common()], help="fit ULINF, BEINF and ZOIK and rank them")
    cmp_.add_argument("--data", required=True, help="dataset file or embedded name (elephants)")
    cmp_.add_argument("--cdf-grid", type=_count, default=0,
                      help="points of the empirical/fitted CDF grid; 0 omits it")
    cmp_.set_defaults(handler=cmd_compare)

    sim = commands.add_parser("simulate", parents=[_common()], help="Monte Carlo bias and MSE study")
    _truth(sim)
    sim.add_argument("--sizes", type=_int_list, default=[50, 100, 200, 500, 1000],
                     help="comma-separated sample sizes")
    sim.add_argument("--reps", type=_positive, default=config.DEFAULT_REPLICATIONS, help="replications per size")
    sim.add_argument("--mode", choices=[m.value for m in SamplingMode], default=SamplingMode.STRATIFIED.value)
    sim.add_argument("--workers", type=_positive, default=config.DEFAULT_WORKERS, help="worker processes")
    sim.add_argument("--relative", action="store_true", help="append relative-bias rows")
    sim.set_defaults(handler=cmd_simulate)

    smp = commands.add_parser("sample", parents=[_common()], help="draw from ULINF")
    _truth(smp)
    smp.add_argument("--n", type=_count, required=True, help="number of draws")
    smp.add_argument("--mode", choices=[m.value for m in SamplingMode], default=SamplingMode.MIXTURE.value)
    smp.set_defaults(handler=cmd_sample)

    gen = commands.add_parser("gen-data", parents=[_common()], help="write the pseudo dataset")
    zeros, ones, interior, theta = data_io.PSEUDO_DEFAULTS
    gen.add_argument("--zeros", type=_count, default=zeros)
    gen.add_argument("--ones", type=_count, default=ones)
    gen.add_argument("--interior", type=_count, default=interior)
    gen.add_argument("--theta", type=float, default=theta)
    gen.add_argument("--appendix-b", action="store_true", help="20 zeros, 190 interior, 60 ones")
    gen.set_defaults(handler=cmd_gen_data)

    desc = commands.add_parser("describe", parents=[_common()], help="summary statistics of a dataset")
    desc.add_argument("--data", required=True, help="dataset file or embedded name (elephants)")
    desc.add_argument("--bins", type=_count, default=0,
                      help="interior bins of a frequency histogram for plotting; 0 omits it")
    desc.set_defaults(handler=cmd_describe)

    dens = commands.add_parser("density", parents=[_common()], help="tabulate the interior density")
    dens.add_argument("--alpha", type=float, default=0.8)
    dens.add_argument("--p", type=float, default=0.2)
    dens.add_argument("--thetas", type=_float_list, default=[0.5, 1.0, 2.0, 5.0], help="comma-separated shapes")
    dens.add_argument("--grid", type=int, default=99, help="interior grid points")
    dens.set_defaults(handler=cmd_density)
    return parser


def _configure_logging(verbosity: int) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, config.LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("ulinf").setLevel(level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    _configure_logging(args.verbose)
    try:
        return args.handler(args)
    except (UlinfError, ValidationError) as exc:
        logger.debug("command %s failed", args.command, exc_info=True)
        print(f"ulinf {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
