from typing import Any, Mapping, Optional


class ContinuationFrameworkError(Exception):
    """Base exception for every failure raised by the framework's operations."""

    def __init__(self, operation: str, reason: str, details: Optional[Mapping[str, Any]] = None):
        self.operation = operation
        self.reason = reason
        self.details = dict(details or {})
        message = f"{operation}: {reason}"
        if self.details:
            rendered = ", ".join(f"{key}={value!r}" for key, value in self.details.items())
            message = f"{message} ({rendered})"
        super().__init__(message)


class ValidationError(ContinuationFrameworkError):
    """Inputs violate a documented precondition. The CLI maps these to exit status 1."""


class NumericalFailure(ContinuationFrameworkError):
    """A computation could not reach its target. The CLI maps these to exit status 2."""


class ConfigError(ValidationError):
    pass


class OutOfDisk(ValidationError):
    pass


class DegenerateOrder(ValidationError):
    pass


class InsufficientOrder(ValidationError):
    pass


class CenterMismatch(ValidationError):
    pass


class PathError(ValidationError):
    pass


class SectorViolation(ValidationError):
    pass


class DomainViolation(ValidationError):
    pass


class PoleAtNonpositiveInteger(ValidationError):
    pass


class InvariantViolation(ValidationError):
    pass


class MultipleZero(ValidationError):
    pass


class NumericalOverflow(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    pass


class StalledLoop(NumericalFailure):
    pass


class OverlapMismatch(NumericalFailure):
    pass
