"""
Closed-form germ sources.

A source knows one analytic function family globally and can expand it at any regular
point. They supply the coefficients of the named germs and the exact reference charts
that continued germs are checked against; for multivalued families the branch is the
one whose value at the center is nearest to an anchor value.
"""
import cmath
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from continuation_framework.analysis.lacunary import lacunary_taylor_coefficients
from continuation_framework.errors import OutOfDisk
from continuation_framework.utils.numerics import ensure_finite_array


def _inverse_powers(center: complex, order: int) -> np.ndarray:
    """1, 1/q, 1/q^2, ..., 1/q^order."""
    ratios = np.full(order, 1.0 / center, dtype=complex)
    return np.concatenate(([1.0 + 0.0j], np.cumprod(ratios)))


class GermSource(ABC):
    """A closed-form function family that can be re-expanded at regular points."""

    name = "source"

    @abstractmethod
    def singular_distance(self, center: complex) -> float:
        """Exact radius of convergence of the expansion at `center`."""

    @abstractmethod
    def coefficients(self, center: complex, order: int, anchor: Optional[complex]) -> np.ndarray:
        """Taylor coefficients 0..order at `center` on the branch nearest to `anchor`."""

    def expand(
        self, center: complex, order: int, anchor: Optional[complex] = None
    ) -> Tuple[np.ndarray, float]:
        """
        Expand the family at `center`.

        Args:
            center: Expansion point; must be a regular point of the family.
            order: Truncation order.
            anchor: Value the new germ must take at `center` approximately
                (branch selection); None selects the principal branch.

        Returns:
            (coefficients, exact radius).

        Raises:
            OutOfDisk: If `center` is a singular point.
            NumericalOverflow: If a coefficient overflows.
        """
        radius = self.singular_distance(center)
        if not radius > 0.0:
            raise OutOfDisk(f"{self.name}.expand", "center is a singular point",
                            {"center": center})
        coeffs = ensure_finite_array(
            self.coefficients(center, order, anchor), f"{self.name}.expand", "coefficients"
        )
        return coeffs, radius


@dataclass(frozen=True)
class ReciprocalSource(GermSource):
    """z -> 1/(pole - z)."""

    pole: complex = 2.0 + 0.0j
    name = "reciprocal"

    def singular_distance(self, center: complex) -> float:
        return abs(self.pole - center)

    def coefficients(self, center, order, anchor=None):
        return _inverse_powers(self.pole - center, order) / (self.pole - center)


@dataclass(frozen=True)
class SqrtSource(GermSource):
    """z -> +-sqrt(z); the sign is fixed by the anchor."""

    name = "sqrt"

    def singular_distance(self, center: complex) -> float:
        return abs(center)

    def coefficients(self, center, order, anchor=None):
        root = cmath.sqrt(center)
        if anchor is not None and abs(anchor + root) < abs(anchor - root):
            root = -root
        binomials = np.empty(order + 1, dtype=float)
        binomials[0] = 1.0
        for k in range(1, order + 1):
            binomials[k] = binomials[k - 1] * (0.5 - (k - 1)) / k
        return root * binomials * _inverse_powers(center, order)


@dataclass(frozen=True)
class LogSource(GermSource):
    """z -> log z + 2*pi*i*m; m is fixed by the anchor."""

    name = "log"

    def singular_distance(self, center: complex) -> float:
        return abs(center)

    def coefficients(self, center, order, anchor=None):
        value = cmath.log(center)
        if anchor is not None:
            value += 2j * math.pi * round((anchor - value).imag / (2.0 * math.pi))
        k = np.arange(1, order + 1)
        tail = (-1.0) ** (k + 1) / k * _inverse_powers(center, order)[1:]
        return np.concatenate(([value], tail))


@dataclass(frozen=True)
class LacunarySource(GermSource):
    """z -> 1 + z^2 + z^4 + z^8 + ... inside the unit disk."""

    name = "lacunary"

    def singular_distance(self, center: complex) -> float:
        return 1.0 - abs(center)

    def coefficients(self, center, order, anchor=None):
        return lacunary_taylor_coefficients(center, order)
