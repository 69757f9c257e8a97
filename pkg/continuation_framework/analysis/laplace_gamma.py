"""
Laplace-integral solution of G(z + 1) = (1 / 2 pi i) e^(-2 pi i z) G'(z).

G(z) is the integral over the line C: u = 1 + (1 + i) t of e^(-2 pi i u z + i pi u^2) Gamma(u) du.
On C the factor e^(i pi u^2) has modulus e^(-2 pi t^2 - 2 pi t), so every integral here is
a trapezoid rule over a Gaussian-decaying integrand on t in [-T, T].
"""
import cmath
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from continuation_framework.analysis.series_core import Germ
from continuation_framework.config.settings import DEFAULT_CONTOUR, ContourSpec
from continuation_framework.errors import DomainViolation, PoleAtNonpositiveInteger
from continuation_framework.utils.logger import logger_instance
from continuation_framework.utils.numerics import (
    as_finite_complex,
    ensure_finite,
    refine_trapezoid,
)

logger = logger_instance.get_logger_adapter("laplace_gamma")

LANCZOS_G = 7.0
LANCZOS_COEFFICIENTS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
POLE_TOL = 1e-12
STRIP_HALF_WIDTH = 2.0
DOMINANCE_START = 3.0
DECAY_SAMPLES = 241


@dataclass(frozen=True)
class FunctionalEqReport:
    """G(z + 1) against (1 / 2 pi i) e^(-2 pi i z) G'(z) at one point."""

    z: complex
    lhs: complex
    rhs: complex
    rel_residual: float


@dataclass(frozen=True)
class DecayFit:
    """
    Fitted envelope |integrand(t)| <= exp(-2 pi t^2 + A |t| + B) on [-t_max, t_max].

    gaussian_dominant records whether 2 pi t^2 exceeds |A| |t| + |B| for all |t| >= 3.
    """

    A: float
    B: float
    t_max: float
    gaussian_dominant: bool


def _lanczos(u: np.ndarray) -> np.ndarray:
    """Lanczos approximation, valid for Re(u) >= 0.5."""
    x = u - 1.0
    series = np.full(x.shape, LANCZOS_COEFFICIENTS[0], dtype=complex)
    for i in range(1, LANCZOS_COEFFICIENTS.size):
        series = series + LANCZOS_COEFFICIENTS[i] / (x + i)
    t = x + LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * np.exp((x + 0.5) * np.log(t) - t) * series


def gamma_array(u) -> np.ndarray:
    """
    Gamma function on an array of complex points (no pole check).

    Points with Re(u) < 0.5 use the reflection pi / (sin(pi u) Gamma(1 - u)).
    """
    u = np.asarray(u, dtype=complex)
    result = np.empty(u.shape, dtype=complex)
    right = u.real >= 0.5
    result[right] = _lanczos(u[right])
    left = ~right
    if np.any(left):
        v = u[left]
        result[left] = math.pi / (np.sin(math.pi * v) * _lanczos(1.0 - v))
    return result


def gamma(u: complex) -> complex:
    """
    Euler's Gamma function.

    Raises:
        PoleAtNonpositiveInteger: If u is within 1e-12 of 0, -1, -2, ...
    """
    u = as_finite_complex(u, "gamma", "u")
    nearest = round(u.real)
    if nearest <= 0 and abs(u - nearest) < POLE_TOL:
        raise PoleAtNonpositiveInteger("gamma", "Gamma has a pole here", {"u": u})
    return ensure_finite(complex(gamma_array(np.array([u]))[0]), "gamma")


def stirling_check(u: complex) -> float:
    """
    |Gamma(u) / S(u) - 1| with S(u) = exp[(u - 1/2) Log u - u + log(2 pi) / 2].

    Raises:
        DomainViolation: If |u| < 5 or |arg u| >= pi - 0.1.
    """
    u = as_finite_complex(u, "stirling_check", "u")
    if abs(u) < 5.0 or abs(cmath.phase(u)) >= math.pi - 0.1:
        raise DomainViolation("stirling_check", "u outside the Stirling sector",
                              {"u": u, "abs": abs(u)})
    main = cmath.exp((u - 0.5) * cmath.log(u) - u + 0.5 * math.log(2.0 * math.pi))
    return abs(gamma(u) / main - 1.0)


def _require_strip(z: complex, operation: str) -> complex:
    z = as_finite_complex(z, operation)
    if abs(z.imag) > STRIP_HALF_WIDTH:
        raise DomainViolation(operation, "|Im z| must not exceed 2", {"z": z})
    return z


def _contour_points(c: ContourSpec, t: np.ndarray) -> np.ndarray:
    return complex(c.base) + complex(c.direction) * t


def laplace_moment(z: complex, c: ContourSpec = DEFAULT_CONTOUR, power: int = 0,
                   weight: float = 1.0) -> complex:
    """
    Integral over C of (-2 pi i u weight)^power e^(-2 pi i u z + i pi u^2) Gamma(u) du.

    power 0 is G(z) and power 1 is G'(z); higher powers are the higher derivatives.

    Raises:
        DomainViolation: If |Im z| > 2.
        NoConvergence: If node doubling is exhausted.
    """
    z = _require_strip(z, "laplace_moment")
    jacobian = complex(c.direction)

    def integrand(t: np.ndarray) -> np.ndarray:
        u = _contour_points(c, t)
        with np.errstate(under="ignore"):
            kernel = np.exp(-2j * math.pi * u * z + 1j * math.pi * u**2) * gamma_array(u)
        return (-2j * math.pi * weight * u) ** power * kernel * jacobian

    value, _ = refine_trapezoid(integrand, -c.half_extent, c.half_extent, c.nodes,
                                c.refine_tol, c.max_doublings, "laplace_moment")
    return value


def laplace_G(z: complex, c: ContourSpec = DEFAULT_CONTOUR) -> complex:
    return laplace_moment(z, c, 0)


def laplace_G_prime(z: complex, c: ContourSpec = DEFAULT_CONTOUR, weight: float = 1.0
                    ) -> complex:
    """G'(z) by differentiation under the integral sign; `weight` scales the -2 pi i u factor."""
    return laplace_moment(z, c, 1, weight)


def verify_functional_equation(zs: Sequence[complex], c: ContourSpec = DEFAULT_CONTOUR
                               ) -> List[FunctionalEqReport]:
    """
    Check G(z + 1) = (1 / 2 pi i) e^(-2 pi i z) G'(z) at each point.

    rel_residual is |lhs - rhs| / max(|lhs|, |rhs|, 1e-300).
    """
    reports = []
    for z in zs:
        z = _require_strip(z, "verify_functional_equation")
        lhs = laplace_G(z + 1.0, c)
        rhs = cmath.exp(-2j * math.pi * z) * laplace_G_prime(z, c) / (2j * math.pi)
        residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
        logger.debug(f"functional equation at {z}: residual {residual:.3e}")
        reports.append(FunctionalEqReport(z, lhs, rhs, residual))
    if reports:
        logger.info(f"functional equation on {len(reports)} points: max residual "
                    f"{max(r.rel_residual for r in reports):.3e}")
    return reports


def nontriviality_check(z1: complex, z2: complex, c: ContourSpec = DEFAULT_CONTOUR) -> float:
    """
    |R(z1) - R(z2)| with R(z) = G(z) / exp(exp(2 pi i z)).

    The trivial solution exp(exp(2 pi i z)) makes R constant, so a clear nonzero value
    shows G is not a multiple of it.
    """
    def ratio(z: complex) -> complex:
        return laplace_G(z, c) / cmath.exp(cmath.exp(2j * math.pi * z))

    if z1 == z2:
        return 0.0
    return abs(ratio(z1) - ratio(z2))


def contour_translation_check(z: complex, c: ContourSpec = DEFAULT_CONTOUR) -> float:
    """
    |integral over C - 1 minus integral over C| of
    e^(-2 pi i (u + 1) z - 2 pi i u + i pi (u + 1)^2) Gamma(u + 1).

    The integrand has no pole between the two lines, so the difference measures
    only the truncation of the contour and the quadrature error.
    """
    z = _require_strip(z, "contour_translation_check")

    def integral(contour: ContourSpec) -> complex:
        jacobian = complex(contour.direction)

        def integrand(t: np.ndarray) -> np.ndarray:
            u = _contour_points(contour, t)
            with np.errstate(under="ignore"):
                phase = np.exp(-2j * math.pi * (u + 1.0) * z - 2j * math.pi * u
                               + 1j * math.pi * (u + 1.0) ** 2)
            return phase * gamma_array(u + 1.0) * jacobian

        value, _ = refine_trapezoid(integrand, -contour.half_extent, contour.half_extent,
                                    contour.nodes, contour.refine_tol, contour.max_doublings,
                                    "contour_translation_check")
        return value

    return abs(integral(c.translated(-1.0)) - integral(c))


def laplace_taylor_germ(z0: complex, order: int = 16, c: ContourSpec = DEFAULT_CONTOUR) -> Germ:
    """Taylor germ of G at z0 from the moments G^(k)(z0) / k!; G is entire, so radius_hint is inf."""
    z0 = _require_strip(z0, "laplace_taylor_germ")
    coeffs = [laplace_moment(z0, c, k) / math.factorial(k) for k in range(order + 1)]
    return Germ(center=z0, coeffs=coeffs, radius_hint=math.inf)


def integrand_decay_fit(z: complex = 0j, c: ContourSpec = DEFAULT_CONTOUR,
                        t_max: float = 6.0) -> DecayFit:
    """
    Fit A and B in |e^(-2 pi i u z + i pi u^2) Gamma(u)| <= exp(-2 pi t^2 + A |t| + B) on C.

    A is the least-squares slope of log|f| + 2 pi t^2 against |t|; B is the smallest
    intercept that makes the bound hold at every sample.
    """
    z = _require_strip(z, "integrand_decay_fit")
    t = np.linspace(-t_max, t_max, DECAY_SAMPLES)
    u = _contour_points(c, t)
    log_magnitude = (np.real(-2j * math.pi * u * z + 1j * math.pi * u**2)
                     + np.log(np.abs(gamma_array(u))))
    excess = log_magnitude + 2.0 * math.pi * t**2
    A = float(np.polyfit(np.abs(t), excess, 1)[0])
    B = float(np.max(excess - A * np.abs(t)))
    tail = np.abs(t) >= DOMINANCE_START
    dominant = bool(np.all(2.0 * math.pi * t[tail] ** 2 > abs(A) * np.abs(t[tail]) + abs(B)))
    logger.debug(f"decay fit at {z}: A={A:.4f}, B={B:.4f}, dominant={dominant}")
    return DecayFit(A=A, B=B, t_max=t_max, gaussian_dominant=dominant)


def functional_equation_rows(reports: Sequence[FunctionalEqReport]) -> List[list]:
    """CSV rows (re z, im z, rel_residual)."""
    return [[r.z.real, r.z.imag, r.rel_residual] for r in reports]
