"""
Monte Carlo study of the ULINF estimators
Bias, MSE and mean estimates of alpha, theta, p and the plug-in mean and
variance across sample sizes.
"""

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ulinf.inference import sufficient_statistics, theta_mle
from ulinf.inflated_mixture import ulinf_mean_variance, ulinf_sample
from ulinf.models import (
    Estimand,
    SimDesign,
    SimulationCell,
    SimulationReport,
    UlinfParams,
)

logger = logging.getLogger(__name__)

ESTIMANDS = (Estimand.ALPHA, Estimand.THETA, Estimand.P, Estimand.MEAN, Estimand.VARIANCE)

# Row layout of the simulation table; each label names its content
TABLE_ROWS: Tuple[Tuple[str, str, Estimand], ...] = (
    ("Bias.alpha", "bias", Estimand.ALPHA),
    ("Bias.theta", "bias", Estimand.THETA),
    ("Bias.p", "bias", Estimand.P),
    ("MSE.alpha", "mse", Estimand.ALPHA),
    ("MSE.theta", "mse", Estimand.THETA),
    ("MSE.p", "mse", Estimand.P),
    ("alpha.est", "mean_estimate", Estimand.ALPHA),
    ("theta.est", "mean_estimate", Estimand.THETA),
    ("p.est", "mean_estimate", Estimand.P),
    ("E_y", "mean_estimate", Estimand.MEAN),
    ("bias.E", "bias", Estimand.MEAN),
    ("mse.E", "mse", Estimand.MEAN),
    ("V_y", "mean_estimate", Estimand.VARIANCE),
    ("bias.V", "bias", Estimand.VARIANCE),
    ("mse.V", "mse", Estimand.VARIANCE),
)

RELATIVE_ROWS: Tuple[Tuple[str, Estimand], ...] = (
    ("RelBias.alpha", Estimand.ALPHA),
    ("RelBias.theta", Estimand.THETA),
    ("RelBias.p", Estimand.P),
    ("RelBias.E", Estimand.MEAN),
    ("RelBias.V", Estimand.VARIANCE),
)


def replication_rng(seed: int, sample_size: int, replication: int) -> np.random.Generator:
    """Independent stream keyed by (seed, n, r), so any execution order gives the same draws"""
    return np.random.default_rng(np.random.SeedSequence([seed, sample_size, replication]))


def estimate_replication(values: np.ndarray) -> Optional[np.ndarray]:
    """(alpha, theta, p, E, V) for one sample, None when theta is undefined"""
    n, t1, t2, interior, t_y = sufficient_statistics(values)
    theta = theta_mle(t_y, interior.size)
    if theta is None or not math.isfinite(theta):
        return None
    alpha = t1 / n
    p = t2 / t1 if t1 else 0.0
    mean, variance = ulinf_mean_variance(UlinfParams(alpha=alpha, p=p, theta=theta))
    return np.array([alpha, theta, p, mean, variance])


def _run_chunk(design: SimDesign, sample_size: int, start: int, stop: int) -> List[Optional[np.ndarray]]:
    rows = []
    for replication in range(start, stop):
        rng = replication_rng(design.seed, sample_size, replication)
        values = ulinf_sample(sample_size, design.truth, rng, design.mode)
        try:
            rows.append(estimate_replication(values))
        except (ArithmeticError, ValueError) as exc:
            logger.debug("replication %d at n=%d dropped: %s", replication, sample_size, exc)
            rows.append(None)
    return rows


def _chunks(total: int, parts: int) -> List[Tuple[int, int]]:
    size = max(1, math.ceil(total / parts))
    return [(start, min(start + size, total)) for start in range(0, total, size)]


class SimulationRunner:
    """Runs a SimDesign, serially or across worker processes"""

    def __init__(self, design: SimDesign):
        self.design = design
        self.truth_values = self._truth_values(design.truth)

    @staticmethod
    def _truth_values(truth: UlinfParams) -> np.ndarray:
        mean, variance = ulinf_mean_variance(truth)
        return np.array([truth.alpha, truth.theta, truth.p, mean, variance])

    def _estimates(self, sample_size: int, executor: Optional[ProcessPoolExecutor]) -> List[Optional[np.ndarray]]:
        replications = self.design.replications
        if executor is None:
            return _run_chunk(self.design, sample_size, 0, replications)
        chunks = _chunks(replications, self.design.workers * 4)
        futures = [executor.submit(_run_chunk, self.design, sample_size, lo, hi) for lo, hi in chunks]
        rows: List[Optional[np.ndarray]] = []
        for future in futures:
            rows.extend(future.result())
        return rows

    def _aggregate(self, sample_size: int, rows: Sequence[Optional[np.ndarray]]) -> Tuple[List[SimulationCell], int]:
        kept = [row for row in rows if row is not None]
        dropped = len(rows) - len(kept)
        if not kept:
            logger.warning("every replication at n=%d was dropped", sample_size)
            return [], dropped

        estimates = np.vstack(kept)
        errors = estimates - self.truth_values
        bias = errors.mean(axis=0)
        mse = (errors ** 2).mean(axis=0)
        means = estimates.mean(axis=0)

        cells = []
        for j, estimand in enumerate(ESTIMANDS):
            truth = float(self.truth_values[j])
            cells.append(SimulationCell(
                sample_size=sample_size,
                estimand=estimand,
                truth=truth,
                mean_estimate=float(means[j]),
                bias=float(bias[j]),
                relative_bias=float(bias[j] / truth) if truth != 0.0 else None,
                mse=float(max(mse[j], bias[j] ** 2)),
                replications_used=len(kept),
            ))
        return cells, dropped

    def run(self) -> SimulationReport:
        cells: List[SimulationCell] = []
        dropped: Dict[int, int] = {}
        executor = ProcessPoolExecutor(max_workers=self.design.workers) if self.design.workers > 1 else None
        try:
            for sample_size in self.design.sample_sizes:
                rows = self._estimates(sample_size, executor)
                size_cells, size_dropped = self._aggregate(sample_size, rows)
                cells.extend(size_cells)
                dropped[sample_size] = size_dropped
                logger.info(
                    "n=%d: %d replications, %d dropped", sample_size, len(rows), size_dropped
                )
        finally:
            if executor is not None:
                executor.shutdown()
        return SimulationReport(design=self.design, cells=cells, dropped_replications=dropped)


def run_simulation(design: SimDesign) -> SimulationReport:
    """Generate, estimate and aggregate every (sample size, replication) pair.

    Replications without interior observations leave theta undefined and are
    dropped and counted. MSE of the plug-in mean and variance compare those
    estimates (not p) with their true values.
    """
    return SimulationRunner(design).run()


def _table_rows(report: SimulationReport, relative: bool) -> Tuple[List[str], List[List[str]]]:
    sizes = list(report.design.sample_sizes)
    header = [""] + [str(size) for size in sizes]
    if not report.cells:
        return header, []

    def value(size: int, estimand: Estimand, field: str) -> str:
        try:
            cell = report.cell(size, estimand)
        except KeyError:
            return "NA"
        number = getattr(cell, field)
        return "NA" if number is None else repr(float(number))

    rows = [[label] + [value(size, estimand, field) for size in sizes] for label, field, estimand in TABLE_ROWS]
    if relative:
        rows += [[label] + [value(size, estimand, "relative_bias") for size in sizes] for label, estimand in RELATIVE_ROWS]
    return header, rows


def report_to_csv(report: SimulationReport, relative: bool = False) -> str:
    """The simulation table as CSV: one row per statistic, one column per sample size"""
    header, rows = _table_rows(report, relative)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def report_to_text(report: SimulationReport, relative: bool = False) -> str:
    """The simulation table as aligned text, numbers to 10 significant digits"""
    header, rows = _table_rows(report, relative)
    formatted = [header] + [
        [row[0]] + [cell if cell == "NA" else f"{float(cell):.10g}" for cell in row[1:]] for row in rows
    ]
    widths = [max(len(row[i]) for row in formatted) for i in range(len(header))]
    lines = [
        "  ".join(cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i]) for i, cell in enumerate(row))
        for row in formatted
    ]
    footer = f"mode={report.design.mode.value} replications={report.design.replications} dropped={report.total_dropped}"
    return "\n".join(lines + [footer]) + "\n"


def report_to_table(report: SimulationReport, fmt: str = "csv", relative: bool = False) -> str:
    """Render the report as "csv" or "text" """
    if fmt == "csv":
        return report_to_csv(report, relative)
    return report_to_text(report, relative)
