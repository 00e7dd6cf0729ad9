"""Exception hierarchy shared by the library and the command line."""

from typing import Optional


class SphereChordsError(Exception):
    """Base class for all library errors."""


class DomainError(SphereChordsError, ValueError):
    """An argument lies outside the domain of an operation."""


class NonMonotoneCDFError(DomainError):
    """A distribution function decreases somewhere."""

    def __init__(self, message: str, row: int):
        super().__init__(message)
        self.row = row


class QuadratureError(SphereChordsError):
    """Adaptive quadrature did not reach its tolerance."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class UnsupportedBodyError(SphereChordsError):
    """A body has no usable bounding cap or is not line-free."""


class EfficiencyError(SphereChordsError):
    """A rejection sampler accepts too rarely to be useful."""

    def __init__(self, message: str, rate: float):
        super().__init__(message)
        self.rate = rate


class InputDataError(SphereChordsError):
    """A user supplied data file is empty or malformed."""

    def __init__(self, message: str, row: Optional[int] = None):
        super().__init__(message)
        self.row = row
