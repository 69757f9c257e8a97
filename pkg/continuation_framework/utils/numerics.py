"""
Small numerical kernels shared by the analysis modules.

Every reduction goes through `csum`, which sums real and imaginary parts with
`math.fsum`; results therefore do not depend on summation order or thread count.
"""
import cmath
import math
from typing import Callable, Iterable, Tuple

import numpy as np

from continuation_framework.errors import NoConvergence, NumericalOverflow
from continuation_framework.utils.logger import logger_instance

logger = logger_instance.get_logger_adapter("numerics")


def csum(values: Iterable[complex]) -> complex:
    """Compensated sum of complex values in a fixed order."""
    array = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                       dtype=complex)
    return complex(math.fsum(array.real), math.fsum(array.imag))


def ensure_finite(z: complex, operation: str, what: str = "value") -> complex:
    """
    Reject NaN and infinite results.

    Raises:
        NumericalOverflow: If `z` has a non-finite component.
    """
    z = complex(z)
    if not cmath.isfinite(z):
        raise NumericalOverflow(operation, f"non-finite {what}", {what: repr(z)})
    return z


def ensure_finite_array(values: np.ndarray, operation: str, what: str = "values") -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise NumericalOverflow(operation, f"non-finite {what}")
    return values


def trapezoid(samples: np.ndarray, step: float) -> complex:
    """Composite trapezoid rule on equally spaced samples, compensated summation."""
    if samples.size < 2:
        return 0j
    interior = csum(samples[1:-1])
    return step * (interior + 0.5 * (complex(samples[0]) + complex(samples[-1])))


def refine_trapezoid(
    integrand: Callable[[np.ndarray], np.ndarray],
    lower: float,
    upper: float,
    nodes: int,
    tol: float,
    max_doublings: int,
    operation: str,
) -> Tuple[complex, float]:
    """
    Trapezoid rule with node doubling until successive values agree.

    The interval count doubles at every pass (nodes -> 2*nodes - 1), so each pass
    reuses the grid of the previous one. Agreement is measured relative to
    max(1, |value|).

    Args:
        integrand: Vectorized function of the real abscissae.
        lower, upper: Integration limits.
        nodes: Initial node count.
        tol: Agreement threshold between successive passes.
        max_doublings: Number of refinements before giving up.
        operation: Caller name used in logs and errors.

    Returns:
        (value, est_error) where est_error is the last successive difference.

    Raises:
        NoConvergence: If the refinements are exhausted.
        NumericalOverflow: If the integrand produces non-finite samples.
    """
    if upper == lower:
        return 0j, 0.0

    def evaluate(count: int) -> complex:
        abscissae = np.linspace(lower, upper, count)
        samples = ensure_finite_array(integrand(abscissae), operation, "integrand samples")
        return trapezoid(samples, (upper - lower) / (count - 1))

    count = nodes
    previous = evaluate(count)
    difference = math.inf
    for doubling in range(1, max_doublings + 1):
        count = 2 * count - 1
        current = evaluate(count)
        difference = abs(current - previous)
        logger.debug(f"{operation}: pass {doubling} with {count} nodes, change {difference:.3e}")
        if difference < tol * max(1.0, abs(current)):
            return current, difference
        previous = current

    raise NoConvergence(operation, "node doubling did not converge",
                        {"nodes": count, "last_change": difference, "tol": tol})


def as_finite_complex(value, operation: str, what: str = "z") -> complex:
    """Coerce to complex and reject non-finite components."""
    return ensure_finite(complex(value), operation, what)
