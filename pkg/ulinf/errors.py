"""
Exceptions raised by the ULINF toolkit
"""

from typing import Any, List, Optional


class UlinfError(Exception):
    """Base class for every failure the toolkit reports"""


class DomainError(UlinfError, ValueError):
    """Argument outside the domain of a function"""


class SampleValidationError(DomainError):
    """An observation outside [0, 1]"""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"observation {index} = {value!r} is outside [0, 1]")


class DataFormatError(UlinfError, ValueError):
    """A token in a dataset file that does not parse as a number"""

    def __init__(self, line: int, column: int, token: str, source: str = "<input>"):
        self.line = line
        self.column = column
        self.token = token
        super().__init__(f"{source}:{line}:{column}: cannot parse {token!r} as a number")


class InsufficientDataError(UlinfError, ValueError):
    """Not enough observations of the required kind for an estimator"""


class QuadratureError(UlinfError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance"""

    def __init__(self, message: str, estimate: float, error_bound: float):
        self.estimate = estimate
        self.error_bound = error_bound
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error_bound!r})")


class OptimizationError(UlinfError, ArithmeticError):
    """An optimizer stopped without meeting its convergence criterion"""

    def __init__(
        self,
        message: str,
        best_x: Any = None,
        best_value: Optional[float] = None,
        trace: Optional[List[float]] = None,
    ):
        self.best_x = best_x
        self.best_value = best_value
        self.trace = trace or []
        super().__init__(message)


class SingularInformationError(UlinfError, ArithmeticError):
    """Fisher information is singular at a boundary parameter value"""
