import json
import math

import allure
import numpy as np
import pytest

from continuation_framework.analysis.continuation import (
    Arc,
    Classification,
    Line,
    PathSpec,
    StallReason,
    TraceStatus,
    circle_loop,
    continue_along_path,
    densify,
    germ_distance,
    monodromy_loop,
    overlap_residual,
    parse_segment,
    path_from_json,
    path_to_json,
    step_points_rows,
    trace_to_json,
)
from continuation_framework.analysis.series_core import (
    Germ,
    NamedGerm,
    germ_from_source,
    make_named_germ,
    negate_germ,
    recenter,
)
from continuation_framework.analysis.sources import LogSource, ReciprocalSource, SqrtSource
from continuation_framework.base.abstract_test_base import AbstractTestBase
from continuation_framework.errors import CenterMismatch, PathError, StalledLoop
from tests.continuation_test.settings import (
    BOUNDARY_POLICY,
    COEFF_TOL,
    HALF_STEP_POLICY,
    LOG_PERIOD_TOL,
    ORDER,
    POLICY,
)


class TestContinuation(AbstractTestBase):

    @classmethod
    def get_test_case_catalog(cls):
        return {
            "path_spec": {
                "test_function_name": cls.test_path_spec,
                "description": "Contiguity, closedness and the path text/JSON formats",
            },
            "continue_two_charts": {
                "test_function_name": cls.test_continue_two_charts,
                "description": "1/(2-z) continued from 0 to i reproduces the chart at i",
            },
            "continue_into_pole": {
                "test_function_name": cls.test_continue_into_pole,
                "description": "Continuation towards the pole of 1/(2-z) stalls near z = 2",
            },
            "continue_degenerate": {
                "test_function_name": cls.test_continue_degenerate,
                "description": "A zero-length path returns the input germ only",
            },
            "continue_without_tail_law": {
                "test_function_name": cls.test_continue_without_tail_law,
                "description": "Germs without a ratio law are continued by plain recentering",
            },
            "overlap_consistency": {
                "test_function_name": cls.test_overlap_consistency,
                "description": "Consecutive germs agree on their overlap",
            },
            "germ_distance": {
                "test_function_name": cls.test_germ_distance,
                "description": "Germ distance for identical, negated and mismatched germs",
            },
            "monodromy_sqrt": {
                "test_function_name": cls.test_monodromy_sqrt,
                "description": "sqrt returns negated after one loop and unchanged after two",
            },
            "monodromy_orientation": {
                "test_function_name": cls.test_monodromy_orientation,
                "description": "A clockwise loop negates sqrt; a loop and its reverse cancel",
            },
            "monodromy_single_valued": {
                "test_function_name": cls.test_monodromy_single_valued,
                "description": "1/(2-z) returns unchanged around |z| = 1",
            },
            "monodromy_log": {
                "test_function_name": cls.test_monodromy_log,
                "description": "log picks up 2 pi i around the origin",
            },
            "refinement_stability": {
                "test_function_name": cls.test_refinement_stability,
                "description": "Halving the step fraction leaves the final germ unchanged",
            },
            "lacunary_stall": {
                "test_function_name": cls.test_lacunary_stall,
                "description": "The lacunary germ stalls at the natural boundary",
            },
            "trace_emission": {
                "test_function_name": cls.test_trace_emission,
                "description": "Trace JSON and CSV rows have one entry per germ",
            },
        }

    @allure.description("Contiguity, closedness and the path text/JSON formats")
    def test_path_spec(self):
        with self.allure.step_with_log("Step1: non-contiguous segments are rejected."):
            self.assertion.assert_raises(
                PathError, PathSpec, (Line(0j, 1.0), Line(1.1 + 0j, 2.0))
            )
            self.assertion.assert_raises(PathError, PathSpec, ())

        with self.allure.step_with_log("Step2: a full circle is closed, a segment is not."):
            self.assertion.assert_true(circle_loop(0j, 1.0).closed)
            self.assertion.assert_false(PathSpec((Line(0j, 1j),)).closed)

        with self.allure.step_with_log("Step3: arcs are sampled at most 0.1 rad apart."):
            points = densify(circle_loop(0j, 1.0), 0.1)
            angles = np.abs(np.diff(np.unwrap(np.angle(points))))
            self.assertion.assert_less_equal(float(angles.max()), 0.1 + 1e-12)

        with self.allure.step_with_log("Step4: segment strings and JSON round trip."):
            line = parse_segment("line:0,0:2,0")
            self.assertion.assert_equal((line.start, line.end), (0j, 2 + 0j))
            arc = parse_segment("arc:0,0:1:0:6.283185307179586")
            self.assertion.assert_equal(arc.radius, 1.0)
            path = PathSpec((Line(1.0, 0.5 + 0.5j), Line(0.5 + 0.5j, 1j)))
            restored = path_from_json(json.loads(json.dumps(path_to_json(path))))
            self.assertion.assert_equal(restored, path)
            self.assertion.assert_raises(PathError, parse_segment, "spiral:0,0")

    @allure.description("1/(2-z) continued from 0 to i reproduces the chart at i")
    def test_continue_two_charts(self):
        g = make_named_germ(NamedGerm.RECIP_TWO_MINUS_Z, ORDER)
        with self.allure.step_with_log("Step1: continue along the segment 0 -> i."):
            trace = continue_along_path(g, PathSpec((Line(0j, 1j),)), POLICY)
            self.assertion.assert_equal(trace.status, TraceStatus.COMPLETED)
            self.assertion.assert_equal(trace.final_germ.center, 1j)

        with self.allure.step_with_log("Step2: coefficients match (2 - i)^-(k+1)."):
            k = np.arange(17)
            expected = (2 - 1j) ** -(k + 1.0)
            deviation = np.max(np.abs(trace.final_germ.coeffs[:17] - expected))
            self.assertion.assert_less_equal(float(deviation), COEFF_TOL)
            self.assertion.assert_close(trace.final_germ.radius_hint, math.sqrt(5), rel_tol=1e-9)

        with self.allure.step_with_log("Step3: a longer input series lands on the same chart."):
            long_series = make_named_germ(NamedGerm.RECIP_TWO_MINUS_Z, 128)
            trace = continue_along_path(long_series, PathSpec((Line(0j, 1j),)), POLICY)
            self.assertion.assert_equal(trace.status, TraceStatus.COMPLETED)
            exact = germ_from_source(ReciprocalSource(2.0), 1j, ORDER)
            self.assertion.assert_less_equal(germ_distance(trace.final_germ, exact), COEFF_TOL)

    @allure.description("Continuation towards the pole of 1/(2-z) stalls near z = 2")
    def test_continue_into_pole(self):
        g = make_named_germ(NamedGerm.RECIP_TWO_MINUS_Z, ORDER)
        trace = continue_along_path(g, PathSpec((Line(0j, 2.0),)), POLICY)
        with self.allure.step_with_log("Step1: the trace stalls close to the pole."):
            self.assertion.assert_equal(trace.status, TraceStatus.STALLED)
            self.assertion.assert_less_equal(abs(trace.stall_point - 2.0), 0.15)
            self.assertion.assert_equal(trace.stall_reason, StallReason.RADIUS_FLOOR)
        with self.allure.step_with_log("Step2: radii shrink with the distance to the pole."):
            for germ in trace.germs[1:]:
                self.assertion.assert_close(germ.radius_hint, abs(2.0 - germ.center),
                                            rel_tol=1e-9)
        with self.allure.step_with_log("Step3: the mismatched start point is rejected."):
            self.assertion.assert_raises(
                CenterMismatch, continue_along_path, g, PathSpec((Line(1j, 2.0),)), POLICY
            )

    @allure.description("A zero-length path returns the input germ only")
    def test_continue_degenerate(self):
        g = make_named_germ(NamedGerm.SQRT_AT_ONE, ORDER)
        trace = continue_along_path(g, PathSpec((Line(1.0, 1.0),)), POLICY)
        with self.allure.step_with_log("Step1: completed with the input germ alone."):
            self.assertion.assert_equal(trace.status, TraceStatus.COMPLETED)
            self.assertion.assert_equal(len(trace.germs), 1)
            self.assertion.assert_true(trace.germs[0] is g)

    @allure.description("Germs without a ratio law are continued by plain recentering")
    def test_continue_without_tail_law(self):
        k = np.arange(ORDER + 1)
        coeffs = (2.0 ** -(k + 1.0) + (-1.0) ** k * 3.0 ** -(k + 1.0)) / 5.0
        g = Germ(center=0j, coeffs=coeffs)
        with self.allure.step_with_log("Step1: continue 1/((2-z)(3+z)) from 0 to 0.5i."):
            trace = continue_along_path(g, PathSpec((Line(0j, 0.5j),)), POLICY)
            self.assertion.assert_equal(trace.status, TraceStatus.COMPLETED)
        with self.allure.step_with_log("Step2: compare with the partial fractions at 0.5i."):
            n = np.arange(17)
            q = 0.5j
            expected = ((2 - q) ** -(n + 1.0) + (-1.0) ** n * (3 + q) ** -(n + 1.0)) / 5.0
            deviation = np.max(np.abs(trace.final_germ.coeffs[:17] - expected))
            self.assertion.assert_less_equal(float(deviation), COEFF_TOL)

    @pytest.mark.parametrize(
        "name, path",
        [
            (NamedGerm.SQRT_AT_ONE, circle_loop(0j, 1.0)),
            (NamedGerm.RECIP_TWO_MINUS_Z, PathSpec((Line(0j, 1.5j), Line(1.5j, 1.2 + 1.5j)))),
        ],
    )
    @allure.description("Consecutive germs agree on their overlap")
    def test_overlap_consistency(self, name, path):
        g = make_named_germ(name, ORDER)
        trace = continue_along_path(g, path, POLICY)
        with self.allure.step_with_log(f"Step1: check {len(trace.germs) - 1} overlaps."):
            worst = max(overlap_residual(a, b) for a, b in zip(trace.germs, trace.germs[1:]))
            self.assertion.assert_less_equal(worst, POLICY.overlap_tol)

    @allure.description("Germ distance for identical, negated and mismatched germs")
    def test_germ_distance(self):
        g = make_named_germ(NamedGerm.SQRT_AT_ONE, 32)
        with self.allure.step_with_log("Step1: identical germs are at distance 0."):
            self.assertion.assert_equal(germ_distance(g, g, 16), 0.0)
        with self.allure.step_with_log("Step2: a negated germ is at distance at least 0.5."):
            self.assertion.assert_greater(germ_distance(g, negate_germ(g), 16), 0.5)
        with self.allure.step_with_log("Step3: the round trip p -> q -> p is within 1e-8."):
            recip = make_named_germ(NamedGerm.RECIP_TWO_MINUS_Z, 64)
            back = recenter(recenter(recip, 0.5j, 64), 0j, 64, unsafe=True)
            self.assertion.assert_less_equal(germ_distance(recip, back, 16), 1e-8)
        with self.allure.step_with_log("Step4: different centers are rejected."):
            other = make_named_germ(NamedGerm.SQRT_AT_ONE, 32, center=1.5)
            self.assertion.assert_raises(CenterMismatch, germ_distance, g, other, 16)

    @allure.description("sqrt returns negated after one loop and unchanged after two")
    def test_monodromy_sqrt(self):
        g = make_named_germ(NamedGerm.SQRT_AT_ONE, 32)
        with self.allure.step_with_log("Step1: one counterclockwise loop gives negation."):
            report = monodromy_loop(g, circle_loop(0j, 1.0), POLICY)
            self.assertion.assert_equal(report.classification, Classification.NEGATION)
            self.assertion.assert_less_equal(report.distance_to_negated_initial, POLICY.overlap_tol)
        with self.allure.step_with_log("Step2: halfway round, the germ is the chart of i at -1."):
            trace = continue_along_path(g, PathSpec((Arc(0j, 1.0, 0.0, math.pi),)), POLICY)
            exact = germ_from_source(SqrtSource(), -1.0, ORDER, anchor=1j)
            self.assertion.assert_less_equal(germ_distance(trace.final_germ, exact), COEFF_TOL)
        with self.allure.step_with_log("Step3: two loops give the identity."):
            report = monodromy_loop(g, circle_loop(0j, 2.0), POLICY)
            self.assertion.assert_equal(report.classification, Classification.IDENTITY)
            self.assertion.assert_less_equal(report.distance_to_initial, 1e-8)

    @allure.description("A clockwise loop negates sqrt; a loop and its reverse cancel")
    def test_monodromy_orientation(self):
        g = make_named_germ(NamedGerm.SQRT_AT_ONE, ORDER)
        loop = circle_loop(0j, 1.0)
        with self.allure.step_with_log("Step1: the reversed loop also negates."):
            report = monodromy_loop(g, loop.reversed(), POLICY)
            self.assertion.assert_equal(report.classification, Classification.NEGATION)
        with self.allure.step_with_log("Step2: loop followed by its reverse is the identity."):
            report = monodromy_loop(g, loop.then(loop.reversed()), POLICY)
            self.assertion.assert_equal(report.classification, Classification.IDENTITY)
        with self.allure.step_with_log("Step3: open paths are not loops."):
            self.assertion.assert_raises(
                PathError, monodromy_loop, g, PathSpec((Line(1.0, 2.0),)), POLICY
            )

    @allure.description("1/(2-z) returns unchanged around |z| = 1")
    def test_monodromy_single_valued(self):
        g = make_named_germ(NamedGerm.RECIP_TWO_MINUS_Z, ORDER, center=1.0)
        report = monodromy_loop(g, circle_loop(0j, 1.0), POLICY)
        with self.allure.step_with_log("Step1: classification is identity."):
            self.assertion.assert_equal(report.classification, Classification.IDENTITY)
            self.assertion.assert_less_equal(report.distance_to_initial, POLICY.overlap_tol)

    @allure.description("log picks up 2 pi i around the origin")
    def test_monodromy_log(self):
        g = make_named_germ(NamedGerm.LOG_AT_ONE, ORDER)
        report = monodromy_loop(g, circle_loop(0j, 1.0), POLICY)
        with self.allure.step_with_log("Step1: neither identity nor negation."):
            self.assertion.assert_equal(report.classification, Classification.OTHER)
        with self.allure.step_with_log("Step2: the constant term moved by 2 pi i."):
            self.assertion.assert_close(
                report.trace.final_germ.coeffs[0], 2j * math.pi, abs_tol=LOG_PERIOD_TOL
            )
        with self.allure.step_with_log("Step3: the returning germ is the next log branch."):
            exact = germ_from_source(LogSource(), 1.0, ORDER, anchor=2j * math.pi)
            returned = Germ(center=1.0, coeffs=report.trace.final_germ.coeffs)
            self.assertion.assert_less_equal(germ_distance(returned, exact), COEFF_TOL)

    @pytest.mark.parametrize(
        "name, path",
        [
            (NamedGerm.SQRT_AT_ONE, circle_loop(0j, 1.0)),
            (NamedGerm.RECIP_TWO_MINUS_Z, PathSpec((Line(0j, 1j),))),
        ],
    )
    @allure.description("Halving the step fraction leaves the final germ unchanged")
    def test_refinement_stability(self, name, path):
        g = make_named_germ(name, ORDER)
        with self.allure.step_with_log("Step1: continue with the default and half step fraction."):
            coarse = continue_along_path(g, path, POLICY)
            fine = continue_along_path(g, path, HALF_STEP_POLICY)
            self.assertion.assert_greater(len(fine.germs), len(coarse.germs))
        with self.allure.step_with_log("Step2: compare the final germs."):
            self.assertion.assert_less_equal(
                germ_distance(coarse.final_germ, fine.final_germ, 16), 10 * POLICY.overlap_tol
            )

    @allure.description("The lacunary germ stalls at the natural boundary")
    def test_lacunary_stall(self):
        g = make_named_germ(NamedGerm.LACUNARY, ORDER)
        segment = PathSpec((Line(0j, 0.999),))
        with self.allure.step_with_log("Step1: the trace stalls within 0.2 of z = 1."):
            trace = continue_along_path(g, segment, BOUNDARY_POLICY)
            self.assertion.assert_equal(trace.status, TraceStatus.STALLED)
            self.assertion.assert_equal(trace.stall_reason, StallReason.MIN_STEP)
            self.assertion.assert_less_equal(abs(trace.stall_point - 1.0), 0.2)
        with self.allure.step_with_log("Step2: a tighter overlap tolerance stalls earlier."):
            strict = continue_along_path(g, segment, POLICY)
            self.assertion.assert_equal(strict.status, TraceStatus.STALLED)
            self.assertion.assert_greater(trace.stall_point.real, strict.stall_point.real)
        with self.allure.step_with_log("Step3: a loop that stalls raises StalledLoop."):
            loop = PathSpec((Line(0j, 0.999), Line(0.999, 0j)))
            self.assertion.assert_raises(StalledLoop, monodromy_loop, g, loop, BOUNDARY_POLICY)

    @allure.description("Trace JSON and CSV rows have one entry per germ")
    def test_trace_emission(self):
        g = make_named_germ(NamedGerm.SQRT_AT_ONE, 16)
        trace = continue_along_path(g, PathSpec((Arc(0j, 1.0, 0.0, math.pi),)), POLICY)
        with self.allure.step_with_log("Step1: JSON and rows agree in length."):
            payload = trace_to_json(trace)
            self.assertion.assert_equal(len(payload["germs"]), len(trace.germs))
            self.assertion.assert_equal(len(step_points_rows(trace)), len(payload["step_points"]))
            self.assertion.assert_equal(payload["status"], "completed")
            self.allure.attach_json(payload["step_points"], "step points")
        with self.allure.step_with_log("Step2: the endpoint value is sqrt(-1) = i."):
            self.assertion.assert_close(trace.final_germ.coeffs[0], 1j, abs_tol=1e-12)
