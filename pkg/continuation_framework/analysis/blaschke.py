"""
Finite Blaschke products with engineered zero pairs and the local inverse germs at 0.

For a simple zero a_n of B the inverse branch f_n with f_n(0) = a_n is a convergent
series whose radius r_n is the distance from 0 to the nearest critical value on that
branch. Close pairs of zeros force r_n to shrink with 1 - |a_n|, which is what keeps
the maximal continuation of B^-1 from being a covering.

Inversion is done in rescaled variables: beta(w) = B(a_n + s_w w) / s_zeta, with s_w
read off the growth of the first Taylor coefficients of B at a_n and s_zeta = |B'(a_n)| s_w.
The inverse of beta has coefficients of moderate size even when r_n is tiny.
"""
import cmath
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from continuation_framework.analysis.series_core import Germ, estimate_radius, eval_germ
from continuation_framework.errors import (
    DegenerateOrder,
    DomainViolation,
    InvariantViolation,
    MultipleZero,
)
from continuation_framework.utils.logger import logger_instance
from continuation_framework.utils.numerics import as_finite_complex, csum

logger = logger_instance.get_logger_adapter("blaschke")

DISK_TOL = 1e-12
COINCIDENCE_TOL = 1e-10
SCALE_PROBE_ORDER = 8
BOUND_RTOL = 1e-6
MAX_PAIRS = 12
NEWTON_EXTRA_PASSES = 2
# rounding of a_2n + gap near the circle
GAP_SLACK = 1e-15


@dataclass(frozen=True)
class ZeroSequence:
    """
    Zeros a_0, a_1, ... of a finite Blaschke product.

    When `paired` is set, indices (2n, 2n + 1) are engineered close pairs.
    """

    points: Tuple[complex, ...]
    paired: bool = False

    def __post_init__(self) -> None:
        points = tuple(complex(p) for p in self.points)
        if not points:
            raise InvariantViolation("ZeroSequence", "at least one zero is required")
        for i, p in enumerate(points):
            if not (cmath.isfinite(p) and abs(p) < 1.0):
                raise InvariantViolation("ZeroSequence", "zero outside the open unit disk",
                                         {"index": i, "point": p})
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return len(self.points)

    def partner(self, n: int) -> Optional[int]:
        if not self.paired:
            return None
        other = n ^ 1
        return other if other < len(self.points) else None


@dataclass(frozen=True)
class KoebeReport:
    """
    Bounds for the inverse germ at the zero a_n.

    bound_4_gap and passes_tri2 are None when a_n has no partner (not_applicable set).
    """

    n: int
    a_n: complex
    deriv_B: complex
    deriv_f: complex
    r_n: float
    bound_4_gap: Optional[float]
    bound_shrink: float
    passes_tri2: Optional[bool]
    passes_quatre2: bool
    not_applicable: bool = False


@dataclass(frozen=True)
class KoebeSamples:
    """Boundary samples of f_n on the circle of radius fraction * r_n."""

    n: int
    radius: float
    center_value: complex
    min_distance_to_center: float
    koebe_lower_bound: float
    min_distance_to_partner: Optional[float]


@dataclass(frozen=True)
class _ScaledInverse:
    a: complex
    s_w: float
    s_zeta: float
    beta: np.ndarray
    g: np.ndarray


def make_pair_sequence(n_pairs: int, angle_step: float = 0.3) -> ZeroSequence:
    """
    a_2n = (1 - 2^-(n+2)) e^(i n angle_step), a_2n+1 = a_2n + (1 - |a_2n|)^2 e^(i n angle_step).

    Raises:
        DomainViolation: If n_pairs < 1.
        InvariantViolation: If a constructed point leaves the disk or a pair gap is off.
    """
    if n_pairs < 1:
        raise DomainViolation("make_pair_sequence", "n_pairs must be at least 1",
                              {"n_pairs": n_pairs})
    points = []
    for n in range(n_pairs):
        direction = cmath.exp(1j * n * angle_step)
        leader = (1.0 - 2.0 ** -(n + 2)) * direction
        gap = (1.0 - abs(leader)) ** 2
        follower = leader + gap * direction
        if abs(follower) >= 1.0:
            raise InvariantViolation("make_pair_sequence", "pair partner escaped the disk",
                                     {"pair": n, "modulus": abs(follower)})
        if abs(follower - leader) > gap + GAP_SLACK:
            raise InvariantViolation("make_pair_sequence", "pair gap exceeds (1 - |a|)^2",
                                     {"pair": n})
        points.extend([leader, follower])
    return ZeroSequence(tuple(points), paired=True)


def _require_closed_disk(z: complex, operation: str) -> complex:
    z = as_finite_complex(z, operation)
    if abs(z) > 1.0 + DISK_TOL:
        raise DomainViolation(operation, "z must satisfy |z| <= 1", {"z": z})
    return z


def blaschke_eval(zs: ZeroSequence, z: complex) -> complex:
    """Finite product of (z - a_k) / (1 - conj(a_k) z) in index order."""
    z = _require_closed_disk(z, "blaschke_eval")
    value = 1.0 + 0j
    for a in zs.points:
        value *= (z - a) / (1.0 - a.conjugate() * z)
    return value


def blaschke_derivative(zs: ZeroSequence, z: complex) -> complex:
    """
    B'(z) by the product rule: sum over j of phi_j'(z) times the other factors.

    Prefix and suffix products avoid dividing by a vanishing factor, so z = a_k
    needs no special case.
    """
    z = _require_closed_disk(z, "blaschke_derivative")
    factors = [(z - a) / (1.0 - a.conjugate() * z) for a in zs.points]
    slopes = [(1.0 - abs(a) ** 2) / (1.0 - a.conjugate() * z) ** 2 for a in zs.points]
    count = len(factors)
    prefix = [1.0 + 0j] * (count + 1)
    suffix = [1.0 + 0j] * (count + 1)
    for i in range(count):
        prefix[i + 1] = prefix[i] * factors[i]
        suffix[count - 1 - i] = suffix[count - i] * factors[count - 1 - i]
    return csum(slopes[j] * prefix[j] * suffix[j + 1] for j in range(count))


def _check_simple(zs: ZeroSequence, operation: str) -> None:
    points = np.array(zs.points)
    distances = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(distances, np.inf)
    if distances.min() <= COINCIDENCE_TOL:
        i, j = np.unravel_index(np.argmin(distances), distances.shape)
        raise MultipleZero(operation, "two zeros coincide", {"first": int(i), "second": int(j)})


def _require_index(zs: ZeroSequence, n: int, operation: str) -> complex:
    if not 0 <= n < len(zs):
        raise DomainViolation(operation, "zero index out of range", {"n": n, "count": len(zs)})
    return zs.points[n]


def _truncated_product(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    return np.convolve(a, b)[: order + 1]


def blaschke_taylor_coefficients(zs: ZeroSequence, n: int, order: int,
                                 scale: float = 1.0) -> np.ndarray:
    """
    Exact Taylor coefficients of w -> B(a_n + scale * w) at w = 0.

    Each factor is (delta_j + s w) / c_j * sum_m (conj(a_j) s w / c_j)^m with
    delta_j = a_n - a_j and c_j = 1 - conj(a_j) a_n; the factor series are multiplied
    and truncated in index order.
    """
    a_n = _require_index(zs, n, "blaschke_taylor_coefficients")
    powers = np.arange(order + 1)
    product = np.zeros(order + 1, dtype=complex)
    product[0] = 1.0
    for a_j in zs.points:
        c = 1.0 - a_j.conjugate() * a_n
        geometric = (a_j.conjugate() * scale / c) ** powers / c
        numerator = np.array([a_n - a_j, scale], dtype=complex)
        product = _truncated_product(product, _truncated_product(numerator, geometric, order),
                                     order)
    return product


def compose_series(outer: Sequence[complex], inner: Sequence[complex], order: int) -> np.ndarray:
    """
    Coefficients of outer(inner(w)) through w^order, by Horner's scheme.

    inner[0] must be 0 for the truncation to be exact.
    """
    outer = np.asarray(outer, dtype=complex)
    inner = np.asarray(inner, dtype=complex)[: order + 1]
    result = np.zeros(order + 1, dtype=complex)
    for coefficient in outer[: order + 1][::-1]:
        result = _truncated_product(result, inner, order)
        result = np.pad(result, (0, order + 1 - result.size))
        result[0] += coefficient
    return result


def series_reciprocal(coeffs: Sequence[complex], order: int) -> np.ndarray:
    """Coefficients of 1 / coeffs(w) through w^order."""
    coeffs = np.pad(np.asarray(coeffs, dtype=complex), (0, order + 1))[: order + 1]
    if coeffs[0] == 0:
        raise DegenerateOrder("series_reciprocal", "constant term vanishes")
    result = np.zeros(order + 1, dtype=complex)
    result[0] = 1.0 / coeffs[0]
    for k in range(1, order + 1):
        result[k] = -csum(coeffs[1 : k + 1] * result[k - 1 :: -1][:k]) / coeffs[0]
    return result


def invert_series(coeffs: Sequence[complex], order: int) -> np.ndarray:
    """
    Compositional inverse g of beta(w) = sum coeffs[k] w^k with coeffs[0] = 0.

    Newton iteration g <- g - (beta o g - zeta) / (beta' o g) on truncated series;
    each pass doubles the number of correct coefficients.

    Raises:
        MultipleZero: If the linear coefficient vanishes.
    """
    beta = np.pad(np.asarray(coeffs, dtype=complex), (0, order + 1))[: order + 1]
    if beta[1] == 0:
        raise MultipleZero("invert_series", "linear coefficient vanishes")
    derivative = np.pad(np.arange(1, order + 1) * beta[1:], (0, 1))
    identity = np.zeros(order + 1, dtype=complex)
    identity[1] = 1.0
    g = identity / beta[1]
    passes = math.ceil(math.log2(order + 1)) + NEWTON_EXTRA_PASSES
    for _ in range(passes):
        residual = compose_series(beta, g, order) - identity
        slope = compose_series(derivative, g, order)
        g = g - _truncated_product(residual, series_reciprocal(slope, order), order)
        g[0] = 0.0
    return g


def _scaled_inverse(zs: ZeroSequence, n: int, order: int) -> _ScaledInverse:
    a_n = _require_index(zs, n, "inverse_germ")
    _check_simple(zs, "inverse_germ")
    probe = blaschke_taylor_coefficients(zs, n, SCALE_PROBE_ORDER)
    b1 = abs(probe[1])
    if b1 == 0.0:
        raise MultipleZero("inverse_germ", "B'(a_n) vanishes", {"n": n})
    growth = max((abs(probe[k]) / b1) ** (1.0 / (k - 1)) for k in range(2, SCALE_PROBE_ORDER + 1))
    s_w = 1.0 / growth if growth > 0.0 else 1.0
    s_zeta = b1 * s_w
    beta = blaschke_taylor_coefficients(zs, n, order, scale=s_w) / s_zeta
    beta[0] = 0.0
    return _ScaledInverse(a=a_n, s_w=s_w, s_zeta=s_zeta, beta=beta, g=invert_series(beta, order))


def inverse_germ(zs: ZeroSequence, n: int, order: int) -> Germ:
    """
    Taylor germ at 0 of the branch f_n of B^-1 with f_n(0) = a_n.

    Coefficients are f_k = s_w g_k / s_zeta^k from the rescaled inverse g; for zeros
    very close to the circle they can overflow (NumericalOverflow), in which case the
    scaled quantities behind koebe_bounds_report are still usable.

    Raises:
        MultipleZero: If two zeros coincide within 1e-10.
        DomainViolation: If n is not an index of the sequence.
    """
    scaled = _scaled_inverse(zs, n, order)
    k = np.arange(order + 1)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        coeffs = scaled.s_w * scaled.g / scaled.s_zeta**k
    coeffs[0] = scaled.a
    return Germ(center=0j, coeffs=coeffs)


def composition_residual(zs: ZeroSequence, n: int, order: int) -> float:
    """Largest coefficient of beta(g(zeta)) - zeta in the rescaled variables."""
    scaled = _scaled_inverse(zs, n, order)
    identity = np.zeros(order + 1, dtype=complex)
    identity[1] = 1.0
    return float(np.max(np.abs(compose_series(scaled.beta, scaled.g, order) - identity)))


def _scaled_radius(scaled: _ScaledInverse) -> Tuple[Germ, float]:
    g_germ = Germ(center=0j, coeffs=scaled.g)
    radius = estimate_radius(g_germ).value
    return Germ(center=0j, coeffs=scaled.g, radius_hint=radius), radius


def koebe_bounds_report(zs: ZeroSequence, n: int, order: int = 48) -> KoebeReport:
    """
    Convergence radius r_n of f_n and the pair bounds 4|a_2n - a_2n+1| >= r_n |f_n'(0)|
    and r_n <= 4 (1 - |a_2n|), each checked with relative tolerance 1e-6.

    Raises:
        DomainViolation: If n is odd or out of range.
    """
    if n % 2:
        raise DomainViolation("koebe_bounds_report", "reports are for pair leaders (even n)",
                              {"n": n})
    scaled = _scaled_inverse(zs, n, order)
    _, scaled_radius = _scaled_radius(scaled)
    r_n = scaled.s_zeta * scaled_radius
    deriv_f = scaled.s_w * complex(scaled.g[1]) / scaled.s_zeta
    deriv_b = blaschke_derivative(zs, scaled.a)

    shrink = 4.0 * (1.0 - abs(scaled.a))
    passes_quatre2 = r_n <= shrink * (1.0 + BOUND_RTOL)
    partner = zs.partner(n)
    if partner is None:
        gap_bound, passes_tri2 = None, None
    else:
        gap_bound = 4.0 * abs(scaled.a - zs.points[partner])
        image = r_n * abs(deriv_f)
        passes_tri2 = gap_bound >= image - BOUND_RTOL * max(gap_bound, image)

    report = KoebeReport(n=n, a_n=scaled.a, deriv_B=deriv_b, deriv_f=deriv_f, r_n=r_n,
                         bound_4_gap=gap_bound, bound_shrink=shrink, passes_tri2=passes_tri2,
                         passes_quatre2=passes_quatre2, not_applicable=partner is None)
    logger.debug(f"zero {n}: r_n={r_n:.6e}, shrink bound {shrink:.6e}, "
                 f"tri2={passes_tri2}, quatre2={passes_quatre2}")
    return report


def koebe_samples(zs: ZeroSequence, n: int, order: int = 48, samples: int = 32,
                  fraction: float = 0.9) -> KoebeSamples:
    """
    Evaluate f_n on the circle |zeta| = fraction * r_n.

    Returns the smallest distance of the samples to a_n, the Koebe quarter bound
    fraction * r_n |f_n'(0)| / 4 and, for paired zeros, the smallest distance to the partner.
    """
    scaled = _scaled_inverse(zs, n, order)
    g_germ, scaled_radius = _scaled_radius(scaled)
    radius = fraction * scaled_radius
    images = []
    for j in range(samples):
        zeta = radius * cmath.exp(2j * math.pi * j / samples)
        images.append(scaled.a + scaled.s_w * eval_germ(g_germ, zeta))
    center_value = scaled.a + scaled.s_w * eval_germ(g_germ, 0j)
    deriv_f = scaled.s_w * abs(scaled.g[1]) / scaled.s_zeta
    partner = zs.partner(n)
    return KoebeSamples(
        n=n,
        radius=scaled.s_zeta * radius,
        center_value=center_value,
        min_distance_to_center=min(abs(w - scaled.a) for w in images),
        koebe_lower_bound=0.25 * scaled.s_zeta * radius * deriv_f,
        min_distance_to_partner=(None if partner is None
                                 else min(abs(w - zs.points[partner]) for w in images)),
    )


def covering_failure_demo(n_pairs: int, order: int = 48, angle_step: float = 0.3
                          ) -> List[KoebeReport]:
    """
    Koebe reports for every pair leader of make_pair_sequence(n_pairs, angle_step).

    Raises:
        DomainViolation: If n_pairs is outside [1, 12].
    """
    if not 1 <= n_pairs <= MAX_PAIRS:
        raise DomainViolation("covering_failure_demo", "n_pairs must lie in [1, 12]",
                              {"n_pairs": n_pairs})
    zs = make_pair_sequence(n_pairs, angle_step)
    reports = [koebe_bounds_report(zs, 2 * p, order) for p in range(n_pairs)]
    logger.info(f"covering demo with {n_pairs} pairs: radii "
                + ", ".join(f"{r.r_n:.3e}" for r in reports))
    return reports


KOEBE_HEADER = ("n", "abs_a_2n", "gap", "r_2n", "bound", "pass_tri2", "pass_quatre2")


def koebe_rows(reports: Sequence[KoebeReport]) -> List[list]:
    """CSV rows in KOEBE_HEADER order; tri2 is empty where it does not apply."""
    rows = []
    for r in reports:
        gap = None if r.bound_4_gap is None else r.bound_4_gap / 4.0
        tri2 = "" if r.passes_tri2 is None else int(r.passes_tri2)
        rows.append([r.n, abs(r.a_n), gap, r.r_n, r.bound_shrink, tri2, int(r.passes_quatre2)])
    return rows
