"""
Continuation of germs along piecewise paths, and monodromy on closed loops.

A path is a chain of straight segments and circular arcs. Arcs are sampled into
chords of at most `StepPolicy.arc_increment` radians, and the stepper walks the
resulting polyline: from the current center it moves to the first point where the
path leaves the disk of radius step_fraction * R (R the current germ's estimated
radius), so each new center lies in the disk of the previous germ.
"""
import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from continuation_framework.analysis.series_core import (
    MODEL_TOL,
    Germ,
    as_complex,
    eval_germ,
    fit_tail_model,
    germ_radius,
    germ_to_json,
    negate_germ,
    recenter,
    recenter_with_tail,
)
from continuation_framework.config.settings import DEFAULT_STEP_POLICY, StepPolicy
from continuation_framework.errors import (
    CenterMismatch,
    InsufficientOrder,
    PathError,
    StalledLoop,
)
from continuation_framework.utils.logger import logger_instance

logger = logger_instance.get_logger_adapter("continuation")

CONTIGUITY_TOL = 1e-12
CENTER_TOL = 1e-10
SEPARATION_FACTOR = 100.0


@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", as_complex(self.start, "Line", "from"))
        object.__setattr__(self, "end", as_complex(self.end, "Line", "to"))

    def vertices(self, arc_increment: float) -> List[complex]:
        return [self.start, self.end]


@dataclass(frozen=True)
class Arc:
    """Circular arc; a positive sweep angle_end - angle_start runs counterclockwise."""

    center: complex
    radius: float
    angle_start: float
    angle_end: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", as_complex(self.center, "Arc", "center"))
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise PathError("Arc", "radius must be positive", {"radius": self.radius})
        if not (math.isfinite(self.angle_start) and math.isfinite(self.angle_end)):
            raise PathError("Arc", "angles must be finite")

    def point(self, angle: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * angle)

    @property
    def start(self) -> complex:
        return self.point(self.angle_start)

    @property
    def end(self) -> complex:
        return self.point(self.angle_end)

    def vertices(self, arc_increment: float) -> List[complex]:
        sweep = self.angle_end - self.angle_start
        pieces = max(1, math.ceil(abs(sweep) / arc_increment))
        return [self.point(self.angle_start + sweep * j / pieces) for j in range(pieces + 1)]


Segment = Union[Line, Arc]


@dataclass(frozen=True)
class PathSpec:
    """
    Contiguous chain of segments.

    Raises:
        PathError: If the chain is empty or two consecutive segments do not meet
            within 1e-12.
    """

    segments: Tuple[Segment, ...]

    def __post_init__(self) -> None:
        segments = tuple(self.segments)
        if not segments:
            raise PathError("PathSpec", "a path needs at least one segment")
        for i in range(1, len(segments)):
            gap = abs(segments[i].start - segments[i - 1].end)
            if gap > CONTIGUITY_TOL:
                raise PathError("PathSpec", "segments are not contiguous",
                                {"segment": i, "gap": gap})
        object.__setattr__(self, "segments", segments)

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    @property
    def closed(self) -> bool:
        return abs(self.end - self.start) <= CONTIGUITY_TOL

    def reversed(self) -> "PathSpec":
        flipped = []
        for segment in reversed(self.segments):
            if isinstance(segment, Line):
                flipped.append(Line(segment.end, segment.start))
            else:
                flipped.append(Arc(segment.center, segment.radius, segment.angle_end,
                                   segment.angle_start))
        return PathSpec(tuple(flipped))

    def then(self, other: "PathSpec") -> "PathSpec":
        return PathSpec(self.segments + other.segments)


def densify(path: PathSpec, arc_increment: float) -> List[complex]:
    """Polyline vertices of the path; consecutive duplicates at segment joints are merged."""
    points = [path.start]
    for segment in path.segments:
        vertices = segment.vertices(arc_increment)
        points.extend(vertices[1:])
    return points


def circle_loop(center_point: complex = 0j, turns: float = 1.0, radius: float = 1.0,
                start_angle: float = 0.0) -> PathSpec:
    """Circle around `center_point`; negative `turns` run clockwise."""
    return PathSpec((Arc(center_point, radius, start_angle,
                         start_angle + 2.0 * math.pi * turns),))


def _pair(value: Any, what: str) -> complex:
    try:
        re, im = value
        return complex(float(re), float(im))
    except (TypeError, ValueError) as e:
        raise PathError("path_from_json", f"{what} must be a [re, im] pair") from e


def path_from_json(obj: Dict[str, Any]) -> PathSpec:
    """
    Build a PathSpec from {"segments": [{"line": {...}} | {"arc": {...}}, ...]}.

    Raises:
        PathError: On a malformed object.
    """
    if not isinstance(obj, dict) or not isinstance(obj.get("segments"), list):
        raise PathError("path_from_json", "expected an object with a 'segments' list")
    segments = []
    for item in obj["segments"]:
        if "line" in item:
            line = item["line"]
            segments.append(Line(_pair(line.get("from"), "from"), _pair(line.get("to"), "to")))
        elif "arc" in item:
            arc = item["arc"]
            try:
                segments.append(Arc(_pair(arc.get("center"), "center"), float(arc["radius"]),
                                    float(arc["from_angle"]), float(arc["to_angle"])))
            except (KeyError, TypeError, ValueError) as e:
                raise PathError("path_from_json", f"malformed arc: {e}") from e
        else:
            raise PathError("path_from_json", "segment must be a line or an arc",
                            {"segment": item})
    return PathSpec(tuple(segments))


def path_to_json(path: PathSpec) -> Dict[str, Any]:
    segments = []
    for segment in path.segments:
        if isinstance(segment, Line):
            segments.append({"line": {"from": [segment.start.real, segment.start.imag],
                                      "to": [segment.end.real, segment.end.imag]}})
        else:
            segments.append({"arc": {"center": [segment.center.real, segment.center.imag],
                                     "radius": segment.radius,
                                     "from_angle": segment.angle_start,
                                     "to_angle": segment.angle_end}})
    return {"segments": segments}


def parse_segment(text: str) -> Segment:
    """
    Parse "line:x0,y0:x1,y1" or "arc:cx,cy:r:a0:a1".

    Raises:
        PathError: On anything else.
    """
    parts = text.strip().split(":")
    try:
        if parts[0] == "line" and len(parts) == 3:
            x0, y0 = (float(v) for v in parts[1].split(","))
            x1, y1 = (float(v) for v in parts[2].split(","))
            return Line(complex(x0, y0), complex(x1, y1))
        if parts[0] == "arc" and len(parts) == 5:
            cx, cy = (float(v) for v in parts[1].split(","))
            return Arc(complex(cx, cy), float(parts[2]), float(parts[3]), float(parts[4]))
    except ValueError as e:
        raise PathError("parse_segment", f"bad number in segment: {e}", {"text": text}) from e
    raise PathError("parse_segment", "expected line:x0,y0:x1,y1 or arc:cx,cy:r:a0:a1",
                    {"text": text})


class TraceStatus(str, Enum):
    COMPLETED = "completed"
    STALLED = "stalled"


class StallReason(str, Enum):
    MIN_STEP = "min_step"
    RADIUS_FLOOR = "radius_floor"
    MAX_STEPS = "max_steps"


@dataclass(frozen=True)
class ContinuationTrace:
    """
    Chain of germs produced along a path; step_points[i] is germs[i].center.
    """

    germs: Tuple[Germ, ...]
    step_points: Tuple[complex, ...]
    status: TraceStatus
    stall_point: Optional[complex] = None
    stall_reason: Optional[StallReason] = None

    @property
    def final_germ(self) -> Germ:
        return self.germs[-1]


class Classification(str, Enum):
    IDENTITY = "identity"
    NEGATION = "negation"
    OTHER = "other"


@dataclass(frozen=True)
class MonodromyReport:
    distance_to_initial: float
    distance_to_negated_initial: float
    classification: Classification
    trace: ContinuationTrace


def _first_exit(vertices: Sequence[complex], index: int, position: complex,
                reach: float) -> Tuple[int, complex]:
    """
    Walk the polyline from `position` on segment `index` and return where it first
    leaves the closed disk |x - position| <= reach, or the last vertex if it never does.
    """
    for i in range(index, len(vertices) - 1):
        a = position if i == index else vertices[i]
        b = vertices[i + 1]
        if abs(b - position) <= reach:
            continue
        d = b - a
        offset = a - position
        qa = abs(d) ** 2
        qb = 2.0 * (d.conjugate() * offset).real
        qc = abs(offset) ** 2 - reach**2
        t = (-qb + math.sqrt(max(qb * qb - 4.0 * qa * qc, 0.0))) / (2.0 * qa)
        return i, a + min(max(t, 0.0), 1.0) * d
    return len(vertices) - 2, vertices[-1]


class _Stepper:
    """
    Next germ and admissible reach along a trace.

    While the ratio law of the tail holds, every step goes through recenter_with_tail
    and the law is re-verified on the new germ's window. Once it fails, the last
    verified germ becomes the anchor: later germs are plain recenterings of its
    polynomial, trusted inside R_a * overlap_tol^(1/(N_a+1)) around the anchor, with
    radius R_a - |z - p_a|.
    """

    def __init__(self, g: Germ, policy: StepPolicy) -> None:
        self.policy = policy
        self.model = fit_tail_model(g)
        self.anchor: Optional[Germ] = None
        self.trust = math.inf
        radius = germ_radius(g)
        if self.model is None:
            self._anchor_at(g, radius)
        else:
            radius = min(radius, self.model.radius)
        self.radius = radius

    def _anchor_at(self, g: Germ, radius: float) -> None:
        self.model = None
        self.anchor = replace(g, radius_hint=radius)
        self.trust = radius * self.policy.overlap_tol ** (1.0 / (g.order + 1))
        logger.info(f"no ratio law at {g.center}: plain recentering within {self.trust:.6e}")

    def reach(self, current: Germ) -> float:
        reach = self.policy.step_fraction * self.radius
        if self.anchor is not None:
            reach = min(reach, self.trust - abs(current.center - self.anchor.center))
        return max(reach, 0.0)

    def advance(self, current: Germ, q: complex) -> Optional[Germ]:
        """Germ at q, or None when the law just failed and the reach must be recomputed."""
        if self.anchor is not None:
            moved = recenter(self.anchor, q, self.policy.order, unsafe=True)
        else:
            moved, law = recenter_with_tail(current, self.model, q, self.policy.order)
            if not law.misfit(moved) <= MODEL_TOL:
                self._anchor_at(current, self.radius)
                return None
            self.model = law
        self.radius = moved.radius_hint
        return moved


def continue_along_path(
    g: Germ, path: PathSpec, policy: StepPolicy = DEFAULT_STEP_POLICY
) -> ContinuationTrace:
    """
    Continue `g` along `path`.

    Each step recenters at the first point where the path leaves the disk of radius
    step_fraction * R around the current center, R the estimated radius (see
    `_Stepper` for how it is carried). The walk stalls (status, not error) when that
    reach drops below min_step, when R falls under the representable floor, or after
    max_steps steps.

    Args:
        g: Starting germ; its center must be the path start.
        path: The path to follow.
        policy: Stepping rules.

    Returns:
        ContinuationTrace, completed or stalled.

    Raises:
        CenterMismatch: If g.center is not the path start.
        NumericalOverflow: Propagated from recentering.
    """
    if abs(g.center - path.start) > CONTIGUITY_TOL:
        raise CenterMismatch("continue_along_path", "germ center is not the path start",
                             {"center": g.center, "start": path.start})

    vertices = densify(path, policy.arc_increment)
    stepper = _Stepper(g, policy)
    germs = [g]
    current = g
    index = 0
    steps = 0
    while True:
        radius = stepper.radius
        reach = stepper.reach(current)
        stall = None
        if radius < policy.radius_floor:
            stall = StallReason.RADIUS_FLOOR
        elif reach < policy.min_step:
            stall = StallReason.MIN_STEP
        elif steps >= policy.max_steps:
            stall = StallReason.MAX_STEPS

        next_index, target = _first_exit(vertices, index, current.center, reach)
        at_end = next_index == len(vertices) - 2 and target == vertices[-1]
        if at_end and target == current.center:
            break
        if stall is not None:
            logger.info(f"stalled at {current.center} after {steps} steps ({stall.value}, "
                        f"radius {radius:.3e})")
            return ContinuationTrace(tuple(germs), tuple(x.center for x in germs),
                                     TraceStatus.STALLED, current.center, stall)

        moved = stepper.advance(current, target)
        if moved is None:
            continue
        index = next_index
        current = moved
        germs.append(current)
        steps += 1
        logger.debug(f"step {steps}: center {target}, radius {stepper.radius:.6e}")
        if at_end:
            break

    logger.info(f"completed path with {steps} steps")
    return ContinuationTrace(tuple(germs), tuple(x.center for x in germs), TraceStatus.COMPLETED)


def germ_distance(g1: Germ, g2: Germ, m: int = 16) -> float:
    """
    max over k <= m of |a_k - b_k| / (1 + |a_k|).

    Raises:
        CenterMismatch: If the centers differ by more than 1e-10.
        InsufficientOrder: If either germ has order below m.
    """
    if abs(g1.center - g2.center) > CENTER_TOL:
        raise CenterMismatch("germ_distance", "germs have different centers",
                             {"first": g1.center, "second": g2.center})
    if g1.order < m or g2.order < m:
        raise InsufficientOrder("germ_distance", "germ order below comparison depth",
                                {"m": m, "orders": (g1.order, g2.order)})
    a = g1.coeffs[: m + 1]
    b = g2.coeffs[: m + 1]
    return float(np.max(np.abs(a - b) / (1.0 + np.abs(a))))


def overlap_residual(g1: Germ, g2: Germ, samples: int = 8) -> float:
    """
    Largest disagreement of two consecutive germs on a circle around the chord
    midpoint whose radius is half the step.
    """
    midpoint = 0.5 * (g1.center + g2.center)
    radius = 0.5 * abs(g2.center - g1.center)
    worst = 0.0
    for j in range(samples):
        z = midpoint + radius * cmath.exp(2j * math.pi * j / samples)
        worst = max(worst, abs(eval_germ(g1, z, unsafe=True) - eval_germ(g2, z, unsafe=True)))
    return worst


def classify(distance_to_initial: float, distance_to_negated: float,
             tol: float) -> Classification:
    if distance_to_initial <= tol and distance_to_negated >= SEPARATION_FACTOR * tol:
        return Classification.IDENTITY
    if distance_to_negated <= tol and distance_to_initial >= SEPARATION_FACTOR * tol:
        return Classification.NEGATION
    return Classification.OTHER


def monodromy_loop(
    g: Germ, loop: PathSpec, policy: StepPolicy = DEFAULT_STEP_POLICY, m: int = 16
) -> MonodromyReport:
    """
    Continue `g` around a closed loop and compare the returning germ with g and -g.

    Raises:
        PathError: If the loop is not closed.
        CenterMismatch: If the loop does not start at g.center.
        StalledLoop: If the continuation stalls.
    """
    if not loop.closed:
        raise PathError("monodromy_loop", "loop is not closed",
                        {"start": loop.start, "end": loop.end})
    trace = continue_along_path(g, loop, policy)
    if trace.status is TraceStatus.STALLED:
        raise StalledLoop("monodromy_loop", "continuation stalled before closing the loop",
                          {"stall_point": trace.stall_point,
                           "reason": trace.stall_reason.value})

    final = trace.final_germ
    returned = Germ(center=g.center, coeffs=final.coeffs, radius_hint=final.radius_hint)
    to_initial = germ_distance(g, returned, m)
    to_negated = germ_distance(negate_germ(g), returned, m)
    classification = classify(to_initial, to_negated, policy.overlap_tol)
    logger.info(f"monodromy {classification.value}: d_id={to_initial:.3e}, "
                f"d_neg={to_negated:.3e}")
    return MonodromyReport(to_initial, to_negated, classification, trace)


def _pair_json(z: Optional[complex]) -> Optional[List[float]]:
    return None if z is None else [z.real, z.imag]


def trace_to_json(trace: ContinuationTrace) -> Dict[str, Any]:
    return {
        "status": trace.status.value,
        "stall_point": _pair_json(trace.stall_point),
        "stall_reason": None if trace.stall_reason is None else trace.stall_reason.value,
        "step_points": [_pair_json(z) for z in trace.step_points],
        "germs": [germ_to_json(g) for g in trace.germs],
    }


def step_points_rows(trace: ContinuationTrace) -> List[list]:
    """CSV rows (index, re, im, radius), one per germ."""
    return [[i, z.real, z.imag, germ_radius(g)]
            for i, (z, g) in enumerate(zip(trace.step_points, trace.germs))]
