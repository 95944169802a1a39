# infoflow/utils/validation.py
# This file contains the exception hierarchy and shared validation helpers
# Purpose: Give every module one family of errors to raise and one way to turn diagnostics lists into exceptions. This is NOT for domain checks themselves (those live next to the types they check).

"""
Exception hierarchy and validation helpers.
"""
from typing import Iterable, List


class InfoflowError(Exception):
    """Base class for all errors raised by infoflow."""

    exit_code: int = 1


class ConfigurationError(InfoflowError, ValueError):
    """Invalid configuration document or parameter combination."""

    exit_code = 2


class NetworkValidationError(InfoflowError, ValueError):
    """A Network violates one of its invariants."""

    exit_code = 2

    def __init__(self, violations: Iterable[str]):
        self.violations: List[str] = list(violations)
        super().__init__("Invalid network: " + "; ".join(self.violations))


class NonConcaveUtilityError(InfoflowError, ValueError):
    """A utility function is not concave or not nondecreasing."""

    exit_code = 2


class SingularModelError(InfoflowError, ValueError):
    """Sensing matrix is rank deficient."""

    exit_code = 2


class SolverConvergenceError(InfoflowError):
    """Solver hit its iteration cap before reaching the requested tolerance."""

    exit_code = 3


class OutputError(InfoflowError, OSError):
    """Result files could not be written."""

    exit_code = 4


class ReportConsistencyError(InfoflowError):
    """A report contains a rate vector the network cannot carry."""

    exit_code = 5


def require_valid(violations: List[str]) -> None:
    """Raise NetworkValidationError if the diagnostics list is non-empty."""
    if violations:
        raise NetworkValidationError(violations)


def require_positive(name: str, value: float) -> None:
    """Raise ConfigurationError unless value > 0."""
    if not value > 0:
        raise ConfigurationError(f"'{name}' must be positive, got {value}")
