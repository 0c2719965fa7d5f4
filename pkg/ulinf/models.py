"""
Data models for the ULINF toolkit
Using Pydantic for validation and JSON rendering
"""

import math
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ulinf import config
from ulinf.errors import InsufficientDataError


class QuadratureSpec(BaseModel):
    """Tolerances for adaptive quadrature"""
    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(default=config.QUAD_ABS_TOL, gt=0)
    rel_tol: float = Field(default=config.QUAD_REL_TOL, gt=0)
    max_subdivisions: int = Field(default=config.QUAD_LIMIT, ge=1)


class OptimSettings(BaseModel):
    """Stopping rules shared by the optimizers"""
    model_config = ConfigDict(frozen=True)

    max_iter: int = Field(default=config.MAX_ITER, ge=1)
    x_tol: float = Field(default=1e-10, gt=0)
    f_tol: float = Field(default=1e-12, gt=0)
    fd_step: Optional[float] = Field(default=None, gt=0)  # None: scaled by |x|


class UnitLindleyParams(BaseModel):
    """Parameter of the unit-Lindley distribution UL(theta)"""
    model_config = ConfigDict(frozen=True)

    theta: float = Field(gt=0, allow_inf_nan=False)


class UlinfParams(BaseModel):
    """Parameter triple (alpha, p, theta) of the inflated unit-Lindley mixture"""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(ge=0, le=1)  # weight of the discrete component
    p: float = Field(ge=0, le=1)  # probability of a one within the discrete component
    theta: float = Field(gt=0, allow_inf_nan=False)

    @property
    def unit_lindley(self) -> UnitLindleyParams:
        return UnitLindleyParams(theta=self.theta)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.alpha, self.p, self.theta)


class PointKind(str, Enum):
    AT_ZERO = "at_zero"
    AT_ONE = "at_one"
    INTERIOR = "interior"


class UlinfPoint(BaseModel):
    """An observation of the mixed model: an endpoint or an interior value"""
    model_config = ConfigDict(frozen=True)

    kind: PointKind
    y: Optional[float] = None

    @model_validator(mode="after")
    def _check_interior(self):
        if self.kind is PointKind.INTERIOR:
            if self.y is None or not 0.0 < self.y < 1.0:
                raise ValueError(f"interior point needs 0 < y < 1, got {self.y!r}")
        elif self.y is not None:
            raise ValueError("endpoint points carry no y value")
        return self

    @classmethod
    def at_zero(cls) -> "UlinfPoint":
        return cls(kind=PointKind.AT_ZERO)

    @classmethod
    def at_one(cls) -> "UlinfPoint":
        return cls(kind=PointKind.AT_ONE)

    @classmethod
    def interior(cls, y: float) -> "UlinfPoint":
        return cls(kind=PointKind.INTERIOR, y=y)

    @classmethod
    def classify(cls, value: float) -> "UlinfPoint":
        """Exact equality decides the endpoints"""
        if value == 0.0:
            return cls.at_zero()
        if value == 1.0:
            return cls.at_one()
        return cls.interior(value)

    @classmethod
    def of(cls, point: Union["UlinfPoint", float]) -> "UlinfPoint":
        """Pass points through, classify plain numbers"""
        return point if isinstance(point, cls) else cls.classify(point)


class BeinfParams(BaseModel):
    """Zero-and-one inflated beta parameters, beta part in shape form"""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(ge=0, le=1)
    gamma: float = Field(ge=0, le=1)
    a: float = Field(gt=0, allow_inf_nan=False)
    b: float = Field(gt=0, allow_inf_nan=False)


class ZoikParams(BaseModel):
    """Zero-and-one inflated Kumaraswamy parameters"""
    model_config = ConfigDict(frozen=True)

    lam: float = Field(ge=0, le=1)  # reported as "lambda"
    p: float = Field(ge=0, le=1)
    a: float = Field(gt=0, allow_inf_nan=False)
    b: float = Field(gt=0, allow_inf_nan=False)


class UlinfEstimate(BaseModel):
    """Maximum likelihood estimates; theta is absent without interior data"""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(ge=0, le=1)
    p: float = Field(ge=0, le=1)
    theta: Optional[float] = Field(default=None, gt=0)

    def to_params(self) -> UlinfParams:
        if self.theta is None:
            raise InsufficientDataError("theta is undefined: the sample has no interior observations")
        return UlinfParams(alpha=self.alpha, p=self.p, theta=self.theta)


class PartitionedSample(BaseModel):
    """A sample split into endpoint counts and interior values"""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=0)
    t1: int = Field(ge=0)  # observations equal to 0 or 1
    t2: int = Field(ge=0)  # observations equal to 1
    interior: Tuple[float, ...] = ()
    t_y: float = Field(default=0.0, ge=0, allow_inf_nan=False)  # sum of y/(1-y) over the interior

    @model_validator(mode="after")
    def _check_counts(self):
        if not self.t2 <= self.t1 <= self.n:
            raise ValueError(f"need t2 <= t1 <= n, got t2={self.t2}, t1={self.t1}, n={self.n}")
        if len(self.interior) != self.n - self.t1:
            raise ValueError("interior length must equal n - t1")
        return self

    @property
    def n_interior(self) -> int:
        return self.n - self.t1

    @property
    def n_zeros(self) -> int:
        return self.t1 - self.t2

    @property
    def n_ones(self) -> int:
        return self.t2


class ModelName(str, Enum):
    ULINF = "ULINF"
    BEINF = "BEINF"
    ZOIK = "ZOIK"


PARAMETER_COUNTS: Dict[ModelName, int] = {
    ModelName.ULINF: 3,
    ModelName.BEINF: 4,
    ModelName.ZOIK: 4,
}


class FitResult(BaseModel):
    """Fitted model with standard errors, intervals and information criteria"""
    model_config = ConfigDict(frozen=True)

    model: ModelName
    estimates: Dict[str, Optional[float]]
    std_errors: Dict[str, Optional[float]] = Field(default_factory=dict)
    conf_intervals: Dict[str, Optional[Tuple[float, float]]] = Field(default_factory=dict)
    level: float = Field(gt=0, lt=1)
    loglik: float
    aic: float
    bic: float
    n: int = Field(ge=0)
    k: int = Field(ge=1)
    derived: Dict[str, float] = Field(default_factory=dict)
    derived_std_errors: Dict[str, Optional[float]] = Field(default_factory=dict)
    derived_conf_intervals: Dict[str, Optional[Tuple[float, float]]] = Field(default_factory=dict)
    flags: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_intervals(self):
        for name, interval in self.conf_intervals.items():
            estimate = self.estimates.get(name)
            if interval is None or estimate is None:
                continue
            lo, hi = interval
            if not lo <= estimate <= hi:
                raise ValueError(f"interval for {name} does not contain its estimate")
        return self

    @classmethod
    def build(cls, model: ModelName, loglik: float, n: int, **fields) -> "FitResult":
        """Fill in k, AIC and BIC from the log-likelihood"""
        k = PARAMETER_COUNTS[model]
        aic = -2.0 * loglik + 2.0 * k
        bic = -2.0 * loglik + k * math.log(n) if n > 0 else math.inf
        return cls(model=model, loglik=loglik, n=n, k=k, aic=aic, bic=bic, **fields)


class SamplingMode(str, Enum):
    MIXTURE = "mixture"  # component membership drawn per observation
    STRATIFIED = "stratified"  # endpoint count fixed at round(alpha * n)


class Estimand(str, Enum):
    ALPHA = "alpha"
    THETA = "theta"
    P = "p"
    MEAN = "E"
    VARIANCE = "V"


class SimDesign(BaseModel):
    """Monte Carlo design for the estimator-quality study"""
    model_config = ConfigDict(frozen=True)

    truth: UlinfParams
    sample_sizes: List[int] = Field(default_factory=lambda: [50, 100, 200, 500, 1000])
    replications: int = Field(default=config.DEFAULT_REPLICATIONS, ge=1)
    mode: SamplingMode = SamplingMode.STRATIFIED
    seed: int = Field(default=config.DEFAULT_SEED, ge=0, lt=2**64)
    workers: int = Field(default=config.DEFAULT_WORKERS, ge=1)

    @field_validator("sample_sizes")
    @classmethod
    def _check_sizes(cls, sizes: List[int]) -> List[int]:
        for size in sizes:
            if size < 2:
                raise ValueError(f"sample sizes must be at least 2, got {size}")
        return sizes


class SimulationCell(BaseModel):
    """Aggregates for one (sample size, estimand) pair"""
    model_config = ConfigDict(frozen=True)

    sample_size: int
    estimand: Estimand
    truth: float
    mean_estimate: float
    bias: float
    relative_bias: Optional[float] = None
    mse: float = Field(ge=0)
    replications_used: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_mse(self):
        if self.mse < self.bias ** 2 - 1e-12:
            raise ValueError("mse must be at least bias squared")
        return self


class SimulationReport(BaseModel):
    """Bias, MSE and mean estimates across sample sizes"""
    model_config = ConfigDict(frozen=True)

    design: SimDesign
    cells: List[SimulationCell] = Field(default_factory=list)
    dropped_replications: Dict[int, int] = Field(default_factory=dict)

    def cell(self, sample_size: int, estimand: Estimand) -> SimulationCell:
        for cell in self.cells:
            if cell.sample_size == sample_size and cell.estimand is estimand:
                return cell
        raise KeyError((sample_size, estimand))

    @property
    def total_dropped(self) -> int:
        return sum(self.dropped_replications.values())


class ComparisonReport(BaseModel):
    """Side-by-side fits ranked by information criteria"""
    model_config = ConfigDict(frozen=True)

    fits: List[FitResult] = Field(default_factory=list)
    failures: Dict[ModelName, str] = Field(default_factory=dict)
    ranking_aic: List[ModelName] = Field(default_factory=list)
    ranking_bic: List[ModelName] = Field(default_factory=list)
    best: Dict[str, ModelName] = Field(default_factory=dict)

    def fit_for(self, model: ModelName) -> Optional[FitResult]:
        for fit in self.fits:
            if fit.model is model:
                return fit
        return None


class CdfGridRow(BaseModel):
    """Empirical and fitted CDFs at one grid point"""
    y: float
    ecdf: float
    cdf_ulinf: Optional[float] = None
    cdf_beinf: Optional[float] = None
    cdf_zoik: Optional[float] = None


class HistogramBin(BaseModel):
    """One bar of the frequency histogram"""
    label: str
    lo: float
    hi: float
    count: int = Field(ge=0)
    density: float = Field(ge=0)


class DensityTable(BaseModel):
    """Mixed density on a grid for several theta values"""
    alpha: float
    p: float
    thetas: List[float]
    y: List[float]
    densities: List[List[float]]  # one column per theta
    mass_at_zero: float
    mass_at_one: float


class DatasetSource(str, Enum):
    EMBEDDED = "embedded"
    FILE = "file"
    GENERATED = "generated"


class Dataset(BaseModel):
    """A named sample of proportions in [0, 1]"""
    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    values: Tuple[float, ...] = ()
    source: DatasetSource

    @field_validator("values")
    @classmethod
    def _check_range(cls, values: Tuple[float, ...]) -> Tuple[float, ...]:
        for index, value in enumerate(values):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"observation {index} = {value!r} is outside [0, 1]")
        return values


class DatasetSummary(BaseModel):
    """Summary statistics of a dataset"""
    name: str
    n: int
    n_zeros: int
    n_ones: int
    n_interior: int
    mean: Optional[float] = None
    median: Optional[float] = None
    std: Optional[float] = None
    q1: Optional[float] = None
    q3: Optional[float] = None
    interior_min: Optional[float] = None
    interior_max: Optional[float] = None
