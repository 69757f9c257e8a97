"""
The Hurwitz-problem function h(z) = integral over t > 0 of exp[-z t - (log t)^2 / (4 pi i)] dt
and its continuation around the origin by rotating the integration ray.

All integrals are taken in the variable s = log|u| on a ray u = e^(s - i theta). As z
turns counterclockwise by theta the ray turns clockwise to arg -theta, which keeps the
left tail e^(s (1 + theta / 2 pi)) integrable for every theta in [0, 2 pi] and keeps the
right tail killed by exp[-Re(z e^(-i theta)) e^s]. At theta = 2 pi the shift
log u -> s - 2 pi i contributes the factor e^s e^(-i pi) = -t, so the loop returns h'.
"""
import cmath
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from continuation_framework.config.settings import DEFAULT_QUADRATURE, QuadratureSpec
from continuation_framework.errors import OverlapMismatch, SectorViolation
from continuation_framework.utils.logger import logger_instance
from continuation_framework.utils.numerics import as_finite_complex, refine_trapezoid, trapezoid

logger = logger_instance.get_logger_adapter("lewy")

FULL_TURN = 2.0 * math.pi
OVERLAP_FACTOR = 10.0
ARC_NODES = 2049


@dataclass(frozen=True)
class SectorEvaluation:
    """
    One quadrature of h on the ray of rotation `theta`.

    Attributes:
        z: Evaluation point.
        theta: Accumulated rotation; valid where Re(z e^(-i theta)) > 0.
        value: The integral.
        est_error: Change over the last node doubling.
    """

    z: complex
    theta: float
    value: complex
    est_error: float


@dataclass(frozen=True)
class SectorStep:
    """Overlap check between the sectors of rotation theta_from and theta_to at `witness`."""

    theta_from: float
    theta_to: float
    witness: complex
    mismatch: float


def _require_sector(z: complex, theta: float, operation: str) -> None:
    margin = (z * cmath.exp(-1j * theta)).real
    if not margin > 0.0:
        raise SectorViolation(operation, "z lies outside the half-plane Re(z e^(-i theta)) > 0",
                              {"z": z, "theta": theta, "margin": margin})


def lewy_eval(z: complex, theta: float = 0.0, q: QuadratureSpec = DEFAULT_QUADRATURE
              ) -> SectorEvaluation:
    """
    Evaluate h(z) on the ray rotated by `theta`.

    The integrand in s is exp[-z e^(s - i theta) + i (s - i theta)^2 / (4 pi) + s - i theta],
    integrated over [s_min, s_max] by the trapezoid rule with node doubling.

    Raises:
        SectorViolation: If Re(z e^(-i theta)) <= 0.
        NoConvergence: If node doubling is exhausted.
    """
    z = as_finite_complex(z, "lewy_eval")
    _require_sector(z, theta, "lewy_eval")

    def integrand(s: np.ndarray) -> np.ndarray:
        log_u = s - 1j * theta
        with np.errstate(under="ignore"):
            return np.exp(-z * np.exp(log_u) + 1j * log_u**2 / (4.0 * math.pi) + log_u)

    value, error = refine_trapezoid(integrand, q.s_min, q.s_max, q.nodes, q.refine_tol,
                                    q.max_doublings, "lewy_eval")
    return SectorEvaluation(z=z, theta=theta, value=value, est_error=error)


def lewy_derivative_evaluation(z: complex, q: QuadratureSpec = DEFAULT_QUADRATURE
                               ) -> SectorEvaluation:
    """Quadrature of the (-t)-weighted integrand, i.e. h'(z), with its error estimate."""
    z = as_finite_complex(z, "lewy_derivative_direct")
    _require_sector(z, 0.0, "lewy_derivative_direct")

    def integrand(s: np.ndarray) -> np.ndarray:
        with np.errstate(under="ignore"):
            return -np.exp(-z * np.exp(s) + 1j * s**2 / (4.0 * math.pi) + 2.0 * s)

    value, error = refine_trapezoid(integrand, q.s_min, q.s_max, q.nodes, q.refine_tol,
                                    q.max_doublings, "lewy_derivative_direct")
    return SectorEvaluation(z=z, theta=0.0, value=value, est_error=error)


def lewy_derivative_direct(z: complex, q: QuadratureSpec = DEFAULT_QUADRATURE) -> complex:
    """
    h'(z) from the integrand weighted by -t, independently of any rotation.

    Raises:
        SectorViolation: If Re(z) <= 0.
        NoConvergence: If node doubling is exhausted.
    """
    return lewy_derivative_evaluation(z, q).value


def _check_steps(z0: complex, n_steps: int, sweep: float, operation: str) -> None:
    _require_sector(z0, 0.0, operation)
    if n_steps < 1 or abs(sweep) / n_steps >= 0.5 * math.pi:
        raise SectorViolation(operation, "rotation increment must stay below pi/2",
                              {"n_steps": n_steps, "sweep": sweep})
    if abs(sweep) == FULL_TURN and n_steps < 5:
        raise SectorViolation(operation, "a full loop needs at least 5 steps",
                              {"n_steps": n_steps})


def lewy_loop_trace(z0: complex, n_steps: int, q: QuadratureSpec = DEFAULT_QUADRATURE,
                    sweep: float = FULL_TURN) -> List[SectorStep]:
    """
    Rotate the ray from 0 to `sweep` in n_steps increments, checking each pair of
    consecutive sectors at the point of the rotated circle |z| = |z0| that bisects them.

    Raises:
        SectorViolation: If Re(z0) <= 0 or an increment reaches pi/2.
        OverlapMismatch: If two sectors disagree by 10 * refine_tol or more.
        NoConvergence: From the quadratures.
    """
    z0 = as_finite_complex(z0, "lewy_loop_trace")
    _check_steps(z0, n_steps, sweep, "lewy_loop_trace")
    steps = []
    for k in range(1, n_steps + 1):
        theta_from = sweep * (k - 1) / n_steps
        theta_to = sweep * k / n_steps
        witness = z0 * cmath.exp(0.5j * (theta_from + theta_to))
        before = lewy_eval(witness, theta_from, q).value
        after = lewy_eval(witness, theta_to, q).value
        mismatch = abs(after - before)
        if mismatch >= OVERLAP_FACTOR * q.refine_tol * max(1.0, abs(before)):
            raise OverlapMismatch("lewy_loop_trace", "consecutive sectors disagree",
                                  {"theta_from": theta_from, "theta_to": theta_to,
                                   "mismatch": mismatch})
        logger.debug(f"sector {k}/{n_steps}: theta {theta_from:.4f} -> {theta_to:.4f}, "
                     f"mismatch {mismatch:.3e}")
        steps.append(SectorStep(theta_from, theta_to, witness, mismatch))
    return steps


def lewy_continue_loop(z0: complex, n_steps: int, q: QuadratureSpec = DEFAULT_QUADRATURE,
                       sweep: float = FULL_TURN) -> SectorEvaluation:
    """
    Continue h once around the origin and evaluate the result back at z0.

    A zero sweep performs no continuation and returns lewy_eval(z0, 0).

    Returns:
        SectorEvaluation at theta = sweep; for a full loop its value is h'(z0).
    """
    z0 = as_finite_complex(z0, "lewy_continue_loop")
    if sweep == 0.0:
        return lewy_eval(z0, 0.0, q)
    steps = lewy_loop_trace(z0, n_steps, q, sweep)
    result = lewy_eval(z0 * cmath.exp(1j * sweep), sweep, q)
    logger.info(f"loop of {sweep:.4f} rad at {z0} in {n_steps} sectors: value {result.value}, "
                f"worst overlap {max(s.mismatch for s in steps):.3e}")
    return result


def contour_shift_check(R: float, eta: float, z: complex) -> float:
    """
    Integral of |exp[-z u + i (log u)^2 / (4 pi)]| |du| over the arc u = R e^(-i t eta), t in [0, 1].

    This is the arc that closes the contour between the rays of rotation 0 and eta;
    it must vanish as R grows for the rotated integral to equal the original.

    Raises:
        SectorViolation: If eta is outside [0, pi/2), Re(z) <= 0 or Re(z e^(-i eta)) <= 0.
    """
    z = as_finite_complex(z, "contour_shift_check")
    if not 0.0 <= eta < 0.5 * math.pi:
        raise SectorViolation("contour_shift_check", "eta must lie in [0, pi/2)", {"eta": eta})
    _require_sector(z, 0.0, "contour_shift_check")
    _require_sector(z, eta, "contour_shift_check")
    if eta == 0.0:
        return 0.0
    t = np.linspace(0.0, 1.0, ARC_NODES)
    log_u = math.log(R) - 1j * t * eta
    with np.errstate(under="ignore"):
        magnitude = np.abs(np.exp(-z * np.exp(log_u) + 1j * log_u**2 / (4.0 * math.pi)))
    return float(trapezoid(magnitude * R * eta, 1.0 / (ARC_NODES - 1)).real)


def sector_steps_to_json(steps: List[SectorStep]) -> List[dict]:
    return [{"theta_from": s.theta_from, "theta_to": s.theta_to,
             "witness": [s.witness.real, s.witness.imag], "mismatch": s.mismatch}
            for s in steps]


@dataclass(frozen=True)
class LoopVerification:
    """Loop-continued value at z0 next to the directly computed derivative h'(z0)."""

    z: complex
    loop_value: complex
    derivative_direct: complex
    rel_error: float
    sectors: List[SectorStep]


def verify_loop_derivative(z0: complex, n_steps: int, q: QuadratureSpec = DEFAULT_QUADRATURE
                           ) -> LoopVerification:
    """Run one full loop at z0 and compare the returning value with h'(z0)."""
    z0 = as_finite_complex(z0, "verify_loop_derivative")
    sectors = lewy_loop_trace(z0, n_steps, q)
    loop_value = lewy_eval(z0 * cmath.exp(1j * FULL_TURN), FULL_TURN, q).value
    direct = lewy_derivative_direct(z0, q)
    rel_error = abs(loop_value - direct) / abs(direct)
    logger.info(f"loop at {z0} in {n_steps} sectors: relative distance to h' {rel_error:.3e}")
    return LoopVerification(z0, loop_value, direct, rel_error, sectors)
