"""
Model comparison services
Fits ULINF, BEINF and ZOIK to one sample and ranks them by AIC and BIC.
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ulinf import config
from ulinf.competitors import beinf_cdf, beinf_fit, zoik_cdf, zoik_fit
from ulinf.errors import DomainError, InsufficientDataError, UlinfError
from ulinf.inference import fit_ulinf, partition, validate_sample
from ulinf.inflated_mixture import ulinf_cdf
from ulinf.models import (
    BeinfParams,
    CdfGridRow,
    ComparisonReport,
    FitResult,
    HistogramBin,
    ModelName,
    PartitionedSample,
    UlinfParams,
    ZoikParams,
)

logger = logging.getLogger(__name__)

FITTERS: Dict[ModelName, Callable[[PartitionedSample, float], FitResult]] = {
    ModelName.ULINF: fit_ulinf,
    ModelName.BEINF: beinf_fit,
    ModelName.ZOIK: zoik_fit,
}

_CDF_COLUMNS = {
    ModelName.ULINF: "cdf_ulinf",
    ModelName.BEINF: "cdf_beinf",
    ModelName.ZOIK: "cdf_zoik",
}


def rank(fits: Sequence[FitResult], criterion: str) -> List[ModelName]:
    """Ascending by criterion; ties go to fewer parameters, then model name"""
    ordered = sorted(fits, key=lambda fit: (getattr(fit, criterion), fit.k, fit.model.value))
    return [fit.model for fit in ordered]


class ModelComparator:
    """Runs every fitter on one partitioned sample"""

    def __init__(self, level: float = config.DEFAULT_LEVEL):
        self.level = level

    def fit_all(self, sample: PartitionedSample) -> ComparisonReport:
        fits: List[FitResult] = []
        failures: Dict[ModelName, str] = {}
        for model, fitter in FITTERS.items():
            try:
                fits.append(fitter(sample, self.level))
            except UlinfError as exc:
                logger.info("%s fit failed: %s", model.value, exc)
                failures[model] = str(exc)

        ranking_aic = rank(fits, "aic")
        ranking_bic = rank(fits, "bic")
        best = {}
        if fits:
            best = {"aic": ranking_aic[0], "bic": ranking_bic[0]}
        return ComparisonReport(
            fits=fits,
            failures=failures,
            ranking_aic=ranking_aic,
            ranking_bic=ranking_bic,
            best=best,
        )


def compare(sample: Sequence[float], level: float = config.DEFAULT_LEVEL) -> ComparisonReport:
    """Partition once, fit the three models and rank them.

    A failing fit is kept in `failures` and left out of the rankings.
    """
    partitioned = partition(sample)
    if partitioned.n == 0:
        raise InsufficientDataError("cannot compare models on an empty sample")
    return ModelComparator(level).fit_all(partitioned)


def _fitted_cdf(fit: FitResult) -> Optional[Callable[[np.ndarray], np.ndarray]]:
    est = fit.estimates
    if any(value is None for value in est.values()):
        return None
    if fit.model is ModelName.ULINF:
        params = UlinfParams(alpha=est["alpha"], p=est["p"], theta=est["theta"])
        return lambda y: ulinf_cdf(y, params)
    if fit.model is ModelName.BEINF:
        beinf = BeinfParams(alpha=est["alpha"], gamma=est["gamma"], a=est["a"], b=est["b"])
        return lambda y: beinf_cdf(y, beinf)
    zoik = ZoikParams(lam=est["lambda"], p=est["p"], a=est["a"], b=est["b"])
    return lambda y: zoik_cdf(y, zoik)


def ecdf_and_fitted_cdfs(
    sample: Sequence[float],
    fits: Sequence[FitResult],
    grid_size: int = 101,
) -> List[CdfGridRow]:
    """Empirical and fitted CDFs on a uniform grid over [0, 1], both ends included"""
    if grid_size < 2:
        raise DomainError(f"CDF grid needs at least 2 points, got {grid_size}")
    values = np.sort(validate_sample(sample))
    grid = np.linspace(0.0, 1.0, grid_size)
    ecdf = np.searchsorted(values, grid, side="right") / max(values.size, 1)

    columns: Dict[str, np.ndarray] = {}
    for fit in fits:
        cdf = _fitted_cdf(fit)
        if cdf is not None:
            columns[_CDF_COLUMNS[fit.model]] = np.asarray(cdf(grid), dtype=float)

    rows = []
    for i, y in enumerate(grid):
        fitted = {name: float(column[i]) for name, column in columns.items()}
        rows.append(CdfGridRow(y=float(y), ecdf=float(ecdf[i]), **fitted))
    return rows


def cdf_distances(grid: Sequence[CdfGridRow]) -> Dict[ModelName, float]:
    """max |ecdf - fitted cdf| over the grid, per model with a column"""
    distances = {}
    for model, column in _CDF_COLUMNS.items():
        gaps = [abs(row.ecdf - getattr(row, column)) for row in grid if getattr(row, column) is not None]
        if gaps:
            distances[model] = max(gaps)
    for model, distance in distances.items():
        logger.info("max |ecdf - cdf| for %s: %.6f", model.value, distance)
    return distances


def histogram_table(sample: Sequence[float], bins: int = 10) -> List[HistogramBin]:
    """Frequency histogram with the endpoints in rows of their own.

    Interior rows split (0, 1) into equal-width bins and report a density
    (count / (n width)); endpoint rows report their share of n.
    """
    if bins < 1:
        raise DomainError(f"histogram needs at least one bin, got {bins}")
    values = validate_sample(sample)
    n = values.size
    interior = values[(values > 0.0) & (values < 1.0)]
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts, _ = np.histogram(interior, bins=edges)
    width = 1.0 / bins

    def share(count: int) -> float:
        return count / n if n else 0.0

    n_zeros = int(np.count_nonzero(values == 0.0))
    n_ones = int(np.count_nonzero(values == 1.0))
    rows = [HistogramBin(label="0", lo=0.0, hi=0.0, count=n_zeros, density=share(n_zeros))]
    for lo, hi, count in zip(edges[:-1], edges[1:], counts):
        rows.append(HistogramBin(
            label=f"({lo:g}, {hi:g})",
            lo=float(lo),
            hi=float(hi),
            count=int(count),
            density=share(int(count)) / width,
        ))
    rows.append(HistogramBin(label="1", lo=1.0, hi=1.0, count=n_ones, density=share(n_ones)))
    return rows
