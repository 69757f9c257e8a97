"""
Truncated power-series germs: construction, evaluation, differentiation, recentering
and radius-of-convergence estimation.

A germ is the desk-scale stand-in for an element (U, f) of a holomorphic function:
coeffs[k] multiplies (z - center)**k. Complex values are plain Python `complex`.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from continuation_framework.analysis.sources import (
    GermSource,
    LacunarySource,
    LogSource,
    ReciprocalSource,
    SqrtSource,
)
from continuation_framework.errors import (
    DegenerateOrder,
    InsufficientOrder,
    InvariantViolation,
    NumericalOverflow,
    OutOfDisk,
)
from continuation_framework.utils.logger import logger_instance
from continuation_framework.utils.numerics import (
    as_finite_complex as as_complex,
    csum,
    ensure_finite,
    ensure_finite_array,
)

logger = logger_instance.get_logger_adapter("series_core")

ComplexValue = complex

EVAL_GUARD = 0.95
UNDERFLOW = 1e-300
MIN_ESTIMATOR_ORDER = 8
# half-window slope drop that marks superexponential (entire-function) decay
CURVATURE_DROP = 0.2
# relative residual below which the ratio law is accepted for a coefficient window
MODEL_TOL = 1e-9
# |ratio| below RATIO_FLOOR * |shift| is the factorial (entire) tail
RATIO_FLOOR = 1e-12
LOG_EXTENSION_TOL = math.log(1e-20)
MAX_EXTENSION = 20000


@dataclass(frozen=True, eq=False)
class Germ:
    """
    Truncated Taylor germ at `center`.

    Attributes:
        center: Expansion point.
        coeffs: Read-only complex array; coeffs[k] multiplies (z - center)**k.
        radius_hint: Known radius of convergence, when available (may be +inf).
    """

    center: complex
    coeffs: np.ndarray
    radius_hint: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", as_complex(self.center, "Germ", "center"))
        coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        if coeffs.size == 0:
            raise InvariantViolation("Germ", "a germ needs at least one coefficient")
        ensure_finite_array(coeffs, "Germ", "coefficients")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        if self.radius_hint is not None and not self.radius_hint > 0.0:
            raise InvariantViolation("Germ", "radius_hint must be positive",
                                     {"radius_hint": self.radius_hint})

    @property
    def order(self) -> int:
        return self.coeffs.size - 1


@dataclass(frozen=True)
class RadiusEstimate:
    """
    Numerical Cauchy-Hadamard estimate.

    `value` is math.inf for the entire-function sentinel; `window` counts the
    coefficients used in the fit; `confidence` is 1 / (1 + rms fit residual).
    """

    value: float
    window: int
    confidence: float

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)


class NamedGerm(str, Enum):
    RECIP_TWO_MINUS_Z = "recip_two_minus_z"
    RECIP_TWO_MINUS_Z_AT_I = "recip_two_minus_z_at_i"
    SQRT_AT_ONE = "sqrt_at_one"
    LACUNARY = "lacunary"
    LOG_AT_ONE = "log_at_one"


_NAMED_SOURCES = {
    NamedGerm.RECIP_TWO_MINUS_Z: (ReciprocalSource(2.0), 0j),
    NamedGerm.RECIP_TWO_MINUS_Z_AT_I: (ReciprocalSource(2.0), 1j),
    NamedGerm.SQRT_AT_ONE: (SqrtSource(), 1.0 + 0j),
    NamedGerm.LACUNARY: (LacunarySource(), 0j),
    NamedGerm.LOG_AT_ONE: (LogSource(), 1.0 + 0j),
}


def germ_from_source(
    source: GermSource, center: complex, order: int, anchor: Optional[complex] = None
) -> Germ:
    """
    Reference chart of a closed-form family at `center`, branch chosen nearest to
    `anchor`, with the exact radius as hint. Used to check continued germs.
    """
    coeffs, radius = source.expand(complex(center), order, anchor)
    return Germ(center=center, coeffs=coeffs, radius_hint=radius)


def make_named_germ(name, order: int, center: Optional[complex] = None) -> Germ:
    """
    Exact truncated Taylor germ of one of the reference functions.

    Only the coefficients are kept: the radius is left to the estimator, like for any
    germ read from a file.

    Args:
        name: A NamedGerm (or its string value).
        order: Truncation order, at least 8.
        center: Optional other expansion point (principal branch); defaults to the
            family's reference center.

    Raises:
        InsufficientOrder: If order < 8.
        ValueError: If `name` is not a known germ.
    """
    name = NamedGerm(name)
    if order < MIN_ESTIMATOR_ORDER:
        raise InsufficientOrder("make_named_germ", "order must be at least 8", {"order": order})
    source, default_center = _NAMED_SOURCES[name]
    point = default_center if center is None else as_complex(center, "make_named_germ", "center")
    coeffs, _ = source.expand(point, order)
    return Germ(center=point, coeffs=coeffs)


def tail_window(order: int) -> Tuple[int, int]:
    """
    Indices [lo, hi] of the coefficients the ratio law is fitted on.

    The window stays in the low part of the series: after recentering, the top
    coefficients of a truncated germ carry the truncation error.
    """
    lo = max(1, order // 16)
    return lo, max(lo + 4, order // 6)


def _window_ratios(g: Germ) -> Tuple[int, Optional[np.ndarray]]:
    lo, hi = tail_window(g.order)
    if g.order < MIN_ESTIMATOR_ORDER:
        return lo, None
    window = g.coeffs[lo:hi + 1]
    if np.any(np.abs(window) < UNDERFLOW):
        return lo, None
    return lo, window[1:] / window[:-1]


@dataclass(frozen=True)
class TailModel:
    """
    Ratio law a_{k+1} / a_k = ratio + shift / (k + 1) of a coefficient tail.

    The law is exact for a pole, an algebraic branch point (z0 - z)^alpha, a logarithm
    and e^z; the nearest singularity is then at distance 1 / |ratio| (ratio 0 means
    entire).
    """

    ratio: complex
    shift: complex
    residual: float = 0.0

    @property
    def radius(self) -> float:
        return math.inf if self.ratio == 0 else 1.0 / abs(self.ratio)

    def factors(self, start: int, stop: int) -> np.ndarray:
        """a_{k+1} / a_k for k in [start, stop)."""
        k = np.arange(start, stop, dtype=float)
        return self.ratio + self.shift / (k + 1.0)

    def moved(self, d: complex) -> "TailModel":
        """The same law seen from a center shifted by `d`: singularity and exponent stay put."""
        scale = 1.0 / (1.0 - self.ratio * d)
        return TailModel(self.ratio * scale, self.shift * scale, self.residual)

    def misfit(self, g: Germ) -> float:
        """Relative residual against g's window ratios; +inf if a window coefficient vanishes."""
        lo, ratios = _window_ratios(g)
        if ratios is None:
            return math.inf
        predicted = self.factors(lo, lo + ratios.size)
        return float(np.linalg.norm(predicted - ratios) / np.linalg.norm(ratios))


def fit_tail_model(g: Germ) -> Optional[TailModel]:
    """
    Least-squares fit of the ratio law on the tail window.

    Returns:
        The model when its relative residual is at most MODEL_TOL, otherwise None
        (zeros in the window, several competing singularities, order below 8).
    """
    lo, ratios = _window_ratios(g)
    if ratios is None:
        return None
    k = np.arange(lo, lo + ratios.size, dtype=float)
    design = np.column_stack((np.ones(ratios.size, dtype=complex), 1.0 / (k + 1.0)))
    (ratio, shift), *_ = np.linalg.lstsq(design, ratios, rcond=None)
    if abs(ratio) <= RATIO_FLOOR * abs(shift):
        ratio = 0j
    model = TailModel(complex(ratio), complex(shift))
    residual = model.misfit(g)
    if not residual <= MODEL_TOL:
        logger.debug(f"ratio law rejected at {g.center}: residual {residual:.3e}")
        return None
    return TailModel(model.ratio, model.shift, residual)


def estimate_radius(g: Germ) -> RadiusEstimate:
    """
    Estimate the radius of convergence from the coefficients.

    When the ratio law fits the tail window the radius is 1 / |ratio| (+inf for a
    factorial tail). Otherwise a least-squares line is fitted to log|a_k| against k over
    the last max(8, order/2) nonzero coefficients and the radius is exp(-slope); a tail
    that underflows (every |a_k| < 1e-300) or decays superexponentially (the slope over
    the upper half of the window is steeper by more than CURVATURE_DROP) returns the
    +inf sentinel.

    Raises:
        InsufficientOrder: If g.order < 8.
    """
    if g.order < MIN_ESTIMATOR_ORDER:
        raise InsufficientOrder("estimate_radius", "order must be at least 8", {"order": g.order})

    model = fit_tail_model(g)
    if model is not None:
        lo, hi = tail_window(g.order)
        return RadiusEstimate(value=model.radius, window=hi - lo + 1,
                              confidence=1.0 / (1.0 + model.residual))

    window = max(MIN_ESTIMATOR_ORDER, g.order // 2)
    magnitudes = np.abs(g.coeffs)
    if np.all(magnitudes[g.order - window + 1:] < UNDERFLOW):
        return RadiusEstimate(value=math.inf, window=window, confidence=1.0)

    indices = [k for k in range(g.order, -1, -1) if magnitudes[k] >= UNDERFLOW][:window]
    indices.reverse()
    ks = np.array(indices, dtype=float)
    logs = np.log(magnitudes[indices])

    if ks.size == 1:
        k = ks[0]
        value = math.inf if k == 0 else math.exp(-logs[0] / k)
        return RadiusEstimate(value=value, window=1, confidence=0.0)

    slope, intercept = np.polyfit(ks, logs, 1)
    residual = logs - (slope * ks + intercept)
    confidence = 1.0 / (1.0 + float(np.sqrt(np.mean(residual**2))))

    if ks.size >= 8:
        half = ks.size // 2
        lower_slope = np.polyfit(ks[:half], logs[:half], 1)[0]
        upper_slope = np.polyfit(ks[half:], logs[half:], 1)[0]
        if upper_slope < 0.0 and upper_slope < lower_slope - CURVATURE_DROP:
            return RadiusEstimate(value=math.inf, window=int(ks.size), confidence=confidence)

    if -slope > 700.0:
        return RadiusEstimate(value=math.inf, window=int(ks.size), confidence=confidence)
    return RadiusEstimate(value=math.exp(-slope), window=int(ks.size), confidence=confidence)


def germ_radius(g: Germ) -> float:
    """Known radius when hinted, otherwise the estimate (+inf below the estimator order)."""
    if g.radius_hint is not None:
        return g.radius_hint
    if g.order < MIN_ESTIMATOR_ORDER:
        return math.inf
    return estimate_radius(g).value


def _check_in_disk(g: Germ, z: complex, operation: str) -> float:
    radius = germ_radius(g)
    distance = abs(z - g.center)
    if distance >= EVAL_GUARD * radius:
        raise OutOfDisk(operation, "point outside 95% of the convergence radius",
                        {"distance": distance, "radius": radius})
    return radius


def eval_germ(g: Germ, z: complex, unsafe: bool = False) -> complex:
    """
    Evaluate the truncated series at `z`.

    Powers of (z - center) are built by successive multiplication and the terms are
    summed with compensated summation, so the result is bit-identical for fixed inputs.

    Args:
        g: The germ.
        z: Evaluation point.
        unsafe: Skip the 95%-of-radius guard.

    Raises:
        OutOfDisk: If the guard rejects `z`.
        NumericalOverflow: If a partial result is non-finite.
    """
    z = as_complex(z, "eval_germ")
    if not unsafe:
        _check_in_disk(g, z, "eval_germ")
    w = z - g.center
    if g.order == 0:
        return complex(g.coeffs[0])
    with np.errstate(over="ignore", invalid="ignore"):
        powers = np.concatenate(([1.0 + 0j], np.cumprod(np.full(g.order, w, dtype=complex))))
        terms = g.coeffs * powers
    ensure_finite_array(terms, "eval_germ", "terms")
    return ensure_finite(csum(terms), "eval_germ")


def derivative_germ(g: Germ) -> Germ:
    """
    Termwise derivative: coeffs[k] = (k+1) * g.coeffs[k+1].

    Raises:
        DegenerateOrder: If g.order == 0.
    """
    if g.order == 0:
        raise DegenerateOrder("derivative_germ", "cannot differentiate an order-0 germ")
    k = np.arange(1, g.order + 1)
    return Germ(center=g.center, coeffs=k * g.coeffs[1:], radius_hint=g.radius_hint)


def recenter(g: Germ, q: complex, order: int, unsafe: bool = False) -> Germ:
    """
    Re-expand the truncated series at `q`.

    b_k = sum_{n>=k} C(n,k) a_n (q-p)^(n-k); the weights C(n,k) d^(n-k) are
    accumulated as running products of d*n/(n-k), so no binomial is formed on its own.

    The result is hinted with the triangle bound R - |q - p| when the input radius R is
    known (always when the guard ran).

    Args:
        g: Germ at p.
        q: New center.
        order: Output truncation order.
        unsafe: Skip the 95%-of-radius guard (callers that bound the step themselves).

    Raises:
        OutOfDisk: If `q` is not well inside the convergence disk.
        NumericalOverflow: If a coefficient overflows.
    """
    q = as_complex(q, "recenter", "q")
    radius = g.radius_hint if unsafe else _check_in_disk(g, q, "recenter")
    d = q - g.center
    count = order + 1
    if d == 0:
        coeffs = np.zeros(count, dtype=complex)
        keep = min(count, g.coeffs.size)
        coeffs[:keep] = g.coeffs[:keep]
        return Germ(center=q, coeffs=coeffs, radius_hint=g.radius_hint)

    coeffs = np.zeros(count, dtype=complex)
    n_top = g.order
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(min(count, n_top + 1)):
            n = np.arange(k + 1, n_top + 1)
            weights = np.concatenate(([1.0 + 0j], np.cumprod(d * n / (n - k))))
            coeffs[k] = csum(g.coeffs[k:] * weights)
    if not np.all(np.isfinite(coeffs)):
        raise NumericalOverflow("recenter", "recentered coefficient overflow", {"q": q})
    logger.debug(f"recentered order-{g.order} germ from {g.center} to {q}")
    hint = None if radius is None or radius <= abs(d) else radius - abs(d)
    return Germ(center=q, coeffs=coeffs, radius_hint=hint)


def _log_binomial(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _extended_terms(g: Germ, model: TailModel, d: complex, depth: int) -> np.ndarray:
    """
    Terms a_n d^n of g continued past its fit window by `model`, up to the index where
    C(n, depth) |a_n d^n| has dropped 20 orders of magnitude below its peak.
    """
    _, start = tail_window(g.order)
    powers = np.concatenate(([1.0 + 0j], np.cumprod(np.full(start, d, dtype=complex))))
    terms = [complex(t) for t in g.coeffs[:start + 1] * powers]
    peak = -math.inf
    n = start
    while n < MAX_EXTENSION:
        terms.append(terms[-1] * (model.ratio + model.shift / (n + 1)) * d)
        n += 1
        if terms[-1] == 0:
            break
        if n < depth:
            continue
        weight = math.log(abs(terms[-1])) + _log_binomial(n, depth)
        peak = max(peak, weight)
        if weight < peak + LOG_EXTENSION_TOL:
            break
    return np.array(terms, dtype=complex)


def recenter_with_tail(g: Germ, model: TailModel, q: complex, order: int
                       ) -> Tuple[Germ, TailModel]:
    """
    Re-expand at `q` the function whose coefficients follow `model` beyond g's window.

    The series is continued by the ratio law, recentered in the variable scaled by
    d = q - p (so only |model.ratio * d| < 1 bounds the terms), and the coefficients
    above the new window are regenerated from the moved law. The new germ is hinted
    with min(moved radius, R + |d|), R the radius of g.

    Args:
        g: Germ at p whose window the model fits.
        model: Ratio law of g's tail.
        q: New center.
        order: Output truncation order (at least 8).

    Returns:
        (germ at q, the law seen from q).

    Raises:
        OutOfDisk: If `q` is outside the disk of convergence of the model.
        NumericalOverflow: If a coefficient overflows.
    """
    q = as_complex(q, "recenter_with_tail", "q")
    d = q - g.center
    if abs(model.ratio * d) >= 1.0:
        raise OutOfDisk("recenter_with_tail", "step leaves the disk of the ratio law",
                        {"step": abs(d), "radius": model.radius})
    if d == 0:
        return recenter(g, q, order, unsafe=True), model

    _, top = tail_window(order)
    scaled = Germ(center=0j, coeffs=_extended_terms(g, model, d, top))
    local = recenter(scaled, 1.0, top, unsafe=True)
    moved = model.moved(d)
    coeffs = np.zeros(order + 1, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        powers = np.concatenate(([1.0 + 0j], np.cumprod(np.full(top, d, dtype=complex))))
        coeffs[:top + 1] = local.coeffs / powers
        coeffs[top + 1:] = coeffs[top] * np.cumprod(moved.factors(top, order))
    if not np.all(np.isfinite(coeffs)):
        raise NumericalOverflow("recenter_with_tail", "recentered coefficient overflow",
                                {"q": q})
    radius = min(moved.radius, germ_radius(g) + abs(d))
    logger.debug(f"recentered with ratio law from {g.center} to {q}, radius {radius:.6e}")
    return Germ(center=q, coeffs=coeffs, radius_hint=radius), moved


def negate_germ(g: Germ) -> Germ:
    return Germ(center=g.center, coeffs=-g.coeffs, radius_hint=g.radius_hint)


def scale_germ_variable(g: Germ, r: float) -> Germ:
    """Coefficients a_k r^k, i.e. the germ of f(center + r (z - center))."""
    powers = float(r) ** np.arange(g.order + 1)
    hint = None if g.radius_hint is None else g.radius_hint / r
    return Germ(center=g.center, coeffs=g.coeffs * powers, radius_hint=hint)


def germ_to_json(g: Germ) -> Dict[str, Any]:
    """Germ JSON object: {"center": [re, im], "coeffs": [[re, im], ...], "radius_hint": x|null}."""
    hint = g.radius_hint
    return {
        "center": [g.center.real, g.center.imag],
        "coeffs": [[float(c.real), float(c.imag)] for c in g.coeffs],
        "radius_hint": None if hint is None or math.isinf(hint) else hint,
    }


def germ_from_json(obj: Dict[str, Any]) -> Germ:
    try:
        center = complex(*obj["center"])
        coeffs = [complex(re, im) for re, im in obj["coeffs"]]
        hint = obj.get("radius_hint")
    except (KeyError, TypeError, ValueError) as e:
        raise InvariantViolation("germ_from_json", f"malformed germ object: {e}") from e
    return Germ(center=center, coeffs=coeffs, radius_hint=None if hint is None else float(hint))
