"""
The natural-boundary exemplar h(z) = 1 + z^2 + z^4 + z^8 + ...

The constant term is 1 and the exponents are 2^n for n >= 1, the only indexing
compatible with h(z^2) = h(z) - z^2. Every point exp(2*pi*i*k/2^m) of the unit
circle is a radial blow-up point, and those points are dense.
"""
import cmath
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from continuation_framework.errors import DomainViolation, OutOfDisk
from continuation_framework.utils.logger import logger_instance
from continuation_framework.utils.numerics import csum, ensure_finite

logger = logger_instance.get_logger_adapter("lacunary")

DEFAULT_TOL = 1e-16
SLOPE_CUTOFF = 0.3
FIRST_PROBE_EXPONENT = 4
MAX_DYADIC_EXPONENT = 62


@dataclass(frozen=True)
class RadialProbeReport:
    """
    |h| sampled along the radius towards exp(2*pi*i*k/2^m) at r_j = 1 - 2^-j.

    growth_slope is the least-squares slope of |h| against j.
    """

    k: int
    m: int
    direction: complex
    exponents: Tuple[int, ...]
    radii: Tuple[float, ...]
    values: Tuple[complex, ...]
    growth_slope: float
    blow_up_detected: bool
    zero_free: bool


def _require_disk(z: complex, operation: str) -> complex:
    z = ensure_finite(complex(z), operation, "z")
    if abs(z) >= 1.0:
        raise OutOfDisk(operation, "h is only defined for |z| < 1", {"abs_z": abs(z)})
    return z


def lacunary_eval(z: complex, tol: float = DEFAULT_TOL) -> complex:
    """
    Partial sums of 1 + z^2 + z^4 + ... until the next term drops below `tol`.

    Terms are produced by repeated squaring of z.

    Raises:
        OutOfDisk: If |z| >= 1.
    """
    z = _require_disk(z, "lacunary_eval")
    terms = [1.0 + 0j]
    power = z * z
    while abs(power) >= tol:
        terms.append(power)
        power = power * power
    return csum(terms)


def telescoped_eval(z: complex, m: int, tol: float = DEFAULT_TOL) -> complex:
    """
    h(z) = z^2 + z^4 + ... + z^(2^m) + h(z^(2^m)).

    Raises:
        OutOfDisk: If |z| >= 1.
        DomainViolation: If m < 1.
    """
    z = _require_disk(z, "telescoped_eval")
    if m < 1:
        raise DomainViolation("telescoped_eval", "depth must be at least 1", {"m": m})
    head = []
    power = z
    for _ in range(m):
        power = power * power
        head.append(power)
    return csum(head + [lacunary_eval(power, tol)])


def tail_argument(z: complex, m: int) -> complex:
    """z^(2^m) by m repeated squarings."""
    for _ in range(m):
        z = z * z
    return z


def dyadic_direction(k: int, m: int) -> complex:
    return cmath.exp(2j * math.pi * k / 2**m)


def radial_probe(k: int, m: int, m_max: int, tol: float = DEFAULT_TOL) -> RadialProbeReport:
    """
    Probe |h| along the radius towards the dyadic point exp(2*pi*i*k/2^m).

    Samples are taken at r_j = 1 - 2^-j for j = 4..m_max, each evaluated through
    the depth-m telescoped identity so that the remaining tail argument lies on the
    positive real axis.

    Raises:
        DomainViolation: If k is outside [0, 2^m) or m_max < 8.
    """
    if m < 0 or not 0 <= k < 2**m:
        raise DomainViolation("radial_probe", "k must lie in [0, 2^m)", {"k": k, "m": m})
    if m_max < 8:
        raise DomainViolation("radial_probe", "m_max must be at least 8", {"m_max": m_max})

    direction = dyadic_direction(k, m)
    exponents = tuple(range(FIRST_PROBE_EXPONENT, m_max + 1))
    radii = tuple(1.0 - 2.0**-j for j in exponents)
    values = []
    for r in radii:
        z = r * direction
        values.append(telescoped_eval(z, m, tol) if m >= 1 else lacunary_eval(z, tol))

    magnitudes = np.abs(np.array(values))
    slope = float(np.polyfit(np.array(exponents, dtype=float), magnitudes, 1)[0])
    report = RadialProbeReport(
        k=k,
        m=m,
        direction=direction,
        exponents=exponents,
        radii=radii,
        values=tuple(values),
        growth_slope=slope,
        blow_up_detected=slope >= SLOPE_CUTOFF,
        zero_free=bool(np.all(magnitudes > 0.0)),
    )
    logger.debug(f"probe k={k} m={m}: slope {slope:.4f}, blow-up {report.blow_up_detected}")
    return report


def boundary_scan(m: int, m_max: int, tol: float = DEFAULT_TOL) -> List[RadialProbeReport]:
    """
    Radial probes towards all 2^m dyadic points of order m.

    Raises:
        DomainViolation: If m > 8.
    """
    if not 0 <= m <= 8:
        raise DomainViolation("boundary_scan", "m must lie in [0, 8]", {"m": m})
    reports = [radial_probe(k, m, m_max, tol) for k in range(2**m)]
    detected = sum(r.blow_up_detected for r in reports)
    logger.info(f"boundary scan m={m}: blow-up on {detected}/{len(reports)} directions")
    return reports


def probe_rows(reports: Sequence[RadialProbeReport]) -> List[list]:
    """CSV rows (k, m, j, r, |h|, slope, flag), one per sample."""
    rows = []
    for report in reports:
        for j, r, value in zip(report.exponents, report.radii, report.values):
            rows.append([report.k, report.m, j, r, abs(value), report.growth_slope,
                         int(report.blow_up_detected)])
    return rows


def functional_equation_residuals(
    count: int = 200, radius: float = 0.7, seed: int = 42, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """
    |h(z) - z^2 - h(z^2)| at `count` points drawn uniformly from the disk |z| <= radius.

    Points come from numpy's PCG64 generator seeded with `seed`.
    """
    rng = np.random.default_rng(seed)
    moduli = radius * np.sqrt(rng.random(count))
    angles = 2.0 * math.pi * rng.random(count)
    residuals = np.empty(count)
    for i, z in enumerate(moduli * np.exp(1j * angles)):
        z = complex(z)
        residuals[i] = abs(lacunary_eval(z, tol) - z * z - lacunary_eval(z * z, tol))
    return residuals


def lacunary_taylor_coefficients(center: complex, order: int) -> np.ndarray:
    """
    Exact Taylor coefficients of h at `center`.

    The k-th coefficient is sum over n >= 1 with 2^n >= k of C(2^n, k) q^(2^n - k)
    (plus 1 when k = 0). The dyadic sum is cut once the exponent is past the peak
    k / (1 - |q|) and the terms have fallen 40 orders below the largest one.

    Raises:
        OutOfDisk: If |center| >= 1.
    """
    q = _require_disk(center, "lacunary_taylor_coefficients")
    coeffs = np.zeros(order + 1, dtype=complex)
    coeffs[0] = 1.0
    if q == 0:
        n = 1
        while 2**n <= order:
            coeffs[2**n] += 1.0
            n += 1
        return coeffs

    log_q = cmath.log(q)
    for k in range(order + 1):
        peak = (k + 1) / (1.0 - abs(q))
        terms = []
        largest = -math.inf
        for n in range(1, MAX_DYADIC_EXPONENT + 1):
            exponent = 2**n
            if exponent < k:
                continue
            log_binomial = (math.lgamma(exponent + 1) - math.lgamma(k + 1)
                            - math.lgamma(exponent - k + 1))
            log_term = log_binomial + (exponent - k) * log_q
            largest = max(largest, log_term.real)
            if log_term.real > largest - 92.0:
                exact = exponent == k
                terms.append(complex(math.exp(log_binomial)) if exact else cmath.exp(log_term))
            if exponent > 2.0 * peak + 64 and log_term.real < largest - 92.0:
                break
        coeffs[k] += csum(terms)
    return coeffs
