"""
Dataset ingestion, embedded datasets and the pseudo-data generator
"""

import csv
import logging
import math
import re
from pathlib import Path
from typing import Iterator, List, Tuple, Union

import numpy as np

from ulinf import config
from ulinf.errors import DataFormatError, DomainError, SampleValidationError
from ulinf.models import Dataset, DatasetSource, DatasetSummary, UnitLindleyParams
from ulinf.unit_lindley import ul_sample

logger = logging.getLogger(__name__)

# Share of newborn elephants with heads up at mid-pregnancy, across herd sizes
ELEPHANTS: Tuple[float, ...] = (
    0.0000, 1.0000, 0.8000, 0.2500, 0.5714, 1.0000, 0.0000, 0.2500, 0.5000,
    1.0000, 1.0000, 0.7000, 1.0000, 0.1429, 0.2667, 1.0000, 0.5000, 0.4000,
    0.6765, 0.4359, 0.0541, 0.4490, 0.4150, 0.6923, 0.1429, 0.0707, 0.0605,
)

EMBEDDED = {"elephants": ELEPHANTS}

# Pseudo-data layouts: (zeros, ones, interior, theta)
PSEUDO_DEFAULTS = (30, 50, 220, 1.444589)
SHORT_PSEUDO_LAYOUT = (20, 60, 190, 1.444589)

_TOKEN = re.compile(r"[^,\s;]+")


def _tokens(text: str) -> Iterator[Tuple[int, int, str]]:
    """(line, column, token) for every token, 1-based positions"""
    for line_no, line in enumerate(text.splitlines(), start=1):
        for match in _TOKEN.finditer(line):
            yield line_no, match.start() + 1, match.group()


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def parse_values(text: str, source: str = "<input>") -> List[float]:
    """Parse whitespace, comma or newline separated numbers.

    A non-numeric first line is taken as a CSV header and skipped.
    """
    values: List[float] = []
    first_line = None
    for line_no, column, token in _tokens(text):
        if first_line is None:
            first_line = line_no
        if line_no == first_line and not values and not _is_number(token):
            # header row; every token on it must be a label
            continue
        try:
            value = float(token)
        except ValueError:
            raise DataFormatError(line_no, column, token, source) from None
        if math.isnan(value):
            raise DataFormatError(line_no, column, token, source)
        values.append(value)
    return values


def _check_range(values: List[float]) -> None:
    for index, value in enumerate(values):
        if not 0.0 <= value <= 1.0:
            raise SampleValidationError(index, value)


def load(path_or_name: Union[str, Path]) -> Dataset:
    """Load an embedded dataset by name, or a plain-text / single-column CSV file"""
    key = str(path_or_name)
    if key in EMBEDDED and not Path(key).exists():
        return Dataset(name=key, values=EMBEDDED[key], source=DatasetSource.EMBEDDED)

    path = Path(path_or_name)
    if not path.is_file():
        raise DomainError(f"no dataset file or embedded dataset named {key!r}")
    values = parse_values(path.read_text(), source=str(path))
    _check_range(values)
    logger.debug("loaded %d values from %s", len(values), path)
    return Dataset(name=path.stem or key, values=tuple(values), source=DatasetSource.FILE)


def write(dataset: Dataset, path: Union[str, Path]) -> Path:
    """Single-column CSV with header "y"; repr keeps every double bit-exact"""
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["y"])
        for value in dataset.values:
            writer.writerow([repr(float(value))])
    return path


def generate_pseudo(
    seed: int = config.DEFAULT_SEED,
    n_zeros: int = PSEUDO_DEFAULTS[0],
    n_ones: int = PSEUDO_DEFAULTS[1],
    n_interior: int = PSEUDO_DEFAULTS[2],
    theta: float = PSEUDO_DEFAULTS[3],
) -> Dataset:
    """Zeros, then unit-Lindley(theta) draws, then ones"""
    if min(n_zeros, n_ones, n_interior) < 0:
        raise DomainError("pseudo-data counts must be non-negative")
    rng = np.random.default_rng(seed)
    interior = ul_sample(n_interior, UnitLindleyParams(theta=theta), rng)
    values = [0.0] * n_zeros + interior.tolist() + [1.0] * n_ones
    name = f"pseudo{len(values)}"
    return Dataset(name=name, values=tuple(values), source=DatasetSource.GENERATED)


def describe(dataset: Dataset) -> DatasetSummary:
    """Counts plus location and spread summaries"""
    values = np.asarray(dataset.values, dtype=float)
    n_zeros = int(np.count_nonzero(values == 0.0))
    n_ones = int(np.count_nonzero(values == 1.0))
    interior = values[(values > 0.0) & (values < 1.0)]
    summary = DatasetSummary(
        name=dataset.name,
        n=values.size,
        n_zeros=n_zeros,
        n_ones=n_ones,
        n_interior=interior.size,
    )
    if values.size:
        q1, median, q3 = np.quantile(values, [0.25, 0.5, 0.75])
        summary = summary.model_copy(update={
            "mean": float(values.mean()),
            "median": float(median),
            "std": float(values.std(ddof=1)) if values.size > 1 else 0.0,
            "q1": float(q1),
            "q3": float(q3),
        })
    if interior.size:
        summary = summary.model_copy(update={
            "interior_min": float(interior.min()),
            "interior_max": float(interior.max()),
        })
    return summary
