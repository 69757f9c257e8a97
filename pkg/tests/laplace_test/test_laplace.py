import cmath
import itertools
import math
from dataclasses import replace

import allure
import numpy as np
import pytest
import scipy.special

from continuation_framework.analysis.laplace_gamma import (
    contour_translation_check,
    functional_equation_rows,
    gamma,
    gamma_array,
    integrand_decay_fit,
    laplace_G,
    laplace_G_prime,
    laplace_moment,
    laplace_taylor_germ,
    nontriviality_check,
    stirling_check,
    verify_functional_equation,
)
from continuation_framework.analysis.series_core import eval_germ
from continuation_framework.base.abstract_test_base import AbstractTestBase
from continuation_framework.errors import DomainViolation, PoleAtNonpositiveInteger
from tests.laplace_test.settings import (
    CONTOUR,
    FUNCTIONAL_EQ_TOL,
    GRID_IM,
    GRID_RE,
    SAMPLE_POINTS,
    TAYLOR_CENTER,
    TAYLOR_ORDER,
)


class TestLaplaceGamma(AbstractTestBase):

    @classmethod
    def get_test_case_catalog(cls):
        return {
            "gamma_values": {
                "test_function_name": cls.test_gamma_values,
                "description": "Gamma at integers, its recurrence and its poles",
            },
            "gamma_oracle": {
                "test_function_name": cls.test_gamma_oracle,
                "description": "Gamma against scipy.special.gamma",
            },
            "gamma_array": {
                "test_function_name": cls.test_gamma_array,
                "description": "Vectorized Gamma matches the scalar one on both half-planes",
            },
            "stirling": {
                "test_function_name": cls.test_stirling,
                "description": "Stirling's main term approaches Gamma",
            },
            "laplace_G": {
                "test_function_name": cls.test_laplace_G,
                "description": "Truncation, nonvanishing and the empty contour",
            },
            "laplace_G_prime": {
                "test_function_name": cls.test_laplace_G_prime,
                "description": "Differentiation under the integral sign",
            },
            "laplace_moment": {
                "test_function_name": cls.test_laplace_moment,
                "description": "Moments 0, 1, 2 are G, G' and G''",
            },
            "functional_equation": {
                "test_function_name": cls.test_functional_equation,
                "description": "G(z+1) = e^(-2 pi i z) G'(z) / (2 pi i) on sample points",
            },
            "functional_equation_grid": {
                "test_function_name": cls.test_functional_equation_grid,
                "description": "G(z+1) = e^(-2 pi i z) G'(z) / (2 pi i) on the 5x5 grid",
            },
            "nontriviality": {
                "test_function_name": cls.test_nontriviality,
                "description": "G is not a multiple of exp(exp(2 pi i z))",
            },
            "contour_translation": {
                "test_function_name": cls.test_contour_translation,
                "description": "Integrals over C and C - 1 agree",
            },
            "taylor_germ": {
                "test_function_name": cls.test_taylor_germ,
                "description": "G agrees with its own Taylor germ",
            },
            "decay_fit": {
                "test_function_name": cls.test_decay_fit,
                "description": "The integrand is dominated by exp(-2 pi t^2)",
            },
        }

    @allure.description("Gamma at integers, its recurrence and its poles")
    def test_gamma_values(self):
        with self.allure.step_with_log("Step1: Gamma(1) = 1 and Gamma(6) = 5!."):
            self.assertion.assert_close(gamma(1.0), 1.0, abs_tol=1e-13)
            self.assertion.assert_close(gamma(6.0), 120.0, rel_tol=1e-12)

        with self.allure.step_with_log("Step2: Gamma(u + 1) = u Gamma(u) on the contour."):
            for t in (-0.7, 0.3, 1.4):
                u = 1.0 + (1.0 + 1.0j) * t
                self.assertion.assert_close(u * gamma(u), gamma(u + 1.0),
                                            rel_tol=1e-10)

        with self.allure.step_with_log("Step3: nonpositive integers are poles."):
            for u in (0.0, -3.0, -2.0 + 1e-14):
                self.assertion.assert_raises(PoleAtNonpositiveInteger, gamma, u)

    @pytest.mark.parametrize("u", [0.3 + 0.1j, -2.5 + 0.5j, 3.7 - 1.2j, -0.5j, 1.0 + 2.0j])
    @allure.description("Gamma against scipy.special.gamma")
    def test_gamma_oracle(self, u):
        with self.allure.step_with_log(f"Step1: Gamma({u})."):
            self.assertion.assert_close(gamma(u), complex(scipy.special.gamma(u)), rel_tol=1e-11)

    @allure.description("Vectorized Gamma matches the scalar one on both half-planes")
    def test_gamma_array(self):
        points = np.array([[0.3 + 0.1j, -2.5 + 0.5j, 3.7 - 1.2j], [-0.5j, 1.0 + 2.0j, 0.5 + 0j]])
        with self.allure.step_with_log("Step1: the shape of the input is kept."):
            values = gamma_array(points)
            self.assertion.assert_equal(values.shape, points.shape)

        with self.allure.step_with_log("Step2: each entry equals the scalar Gamma."):
            for u, value in zip(points.ravel(), values.ravel()):
                self.assertion.assert_close(complex(value), gamma(complex(u)), rel_tol=1e-14)

        with self.allure.step_with_log("Step3: Gamma(1/2) = sqrt(pi) at the reflection seam."):
            self.assertion.assert_close(complex(values[1, 2]), math.sqrt(math.pi), rel_tol=1e-13)

    @allure.description("Stirling's main term approaches Gamma")
    def test_stirling(self):
        with self.allure.step_with_log("Step1: residuals stay inside 2/|u|."):
            self.assertion.assert_less_equal(stirling_check(20.0), 0.1)
            diagonal = 10.0 * (1.0 + 1.0j) / math.sqrt(2.0)
            self.assertion.assert_less_equal(stirling_check(diagonal), 0.2)

        with self.allure.step_with_log("Step2: residuals shrink over 5, 10, 20, 50."):
            ladder = [stirling_check(u) for u in (5.0, 10.0, 20.0, 50.0)]
            self.logger.info(f"Stirling residuals {ladder}")
            for u, residual in zip((5.0, 10.0, 20.0, 50.0), ladder):
                self.assertion.assert_less_equal(residual, 2.0 / u)
            self.assertion.assert_true(all(a > b for a, b in zip(ladder, ladder[1:])))

        with self.allure.step_with_log("Step3: small or negative u is outside the sector."):
            self.assertion.assert_raises(DomainViolation, stirling_check, 3.0)
            self.assertion.assert_raises(DomainViolation, stirling_check, -10.0)

    @allure.description("Truncation, nonvanishing and the empty contour")
    def test_laplace_G(self):
        z = 0.3 + 0.1j
        with self.allure.step_with_log("Step1: T = 3 and T = 6 agree."):
            short = laplace_G(z, replace(CONTOUR, half_extent=3.0))
            full = laplace_G(z, replace(CONTOUR, half_extent=6.0))
            self.assertion.assert_close(short, full, abs_tol=1e-8)

        with self.allure.step_with_log("Step2: G(0) does not vanish."):
            value = laplace_G(0j, CONTOUR)
            self.logger.info(f"G(0) = {value}")
            self.assertion.assert_greater(abs(value), 1e-6)

        with self.allure.step_with_log("Step3: an empty contour integrates to 0."):
            self.assertion.assert_equal(laplace_G(z, replace(CONTOUR, half_extent=0.0)), 0j)

        with self.allure.step_with_log("Step4: points outside |Im z| <= 2 are rejected."):
            self.assertion.assert_raises(DomainViolation, laplace_G, 3.0j, CONTOUR)

    @allure.description("Differentiation under the integral sign")
    def test_laplace_G_prime(self):
        z = 0.3 + 0.1j
        with self.allure.step_with_log("Step1: G'(z) matches a central difference of G."):
            delta = 1e-5
            difference = (laplace_G(z + delta, CONTOUR)
                          - laplace_G(z - delta, CONTOUR)) / (2 * delta)
            derivative = laplace_G_prime(z, CONTOUR)
            self.assertion.assert_close(derivative, difference, rel_tol=1e-5)

        with self.allure.step_with_log("Step2: G'(0) is stable under node doubling."):
            coarse = laplace_G_prime(0j, CONTOUR)
            fine = laplace_G_prime(0j, replace(CONTOUR, nodes=2 * CONTOUR.nodes - 1))
            self.assertion.assert_true(cmath.isfinite(coarse))
            self.assertion.assert_close(fine, coarse, abs_tol=1e-8)

        with self.allure.step_with_log("Step3: weight 0 removes the u factor."):
            self.assertion.assert_equal(laplace_G_prime(z, CONTOUR, weight=0.0), 0j)

    @allure.description("Moments 0, 1, 2 are G, G' and G''")
    def test_laplace_moment(self):
        z = 0.3 + 0.1j
        with self.allure.step_with_log("Step1: moments 0 and 1 are G and G'."):
            self.assertion.assert_equal(laplace_moment(z, CONTOUR, 0), laplace_G(z, CONTOUR))
            self.assertion.assert_equal(laplace_moment(z, CONTOUR, 1), laplace_G_prime(z, CONTOUR))

        with self.allure.step_with_log("Step2: moment 2 matches a central difference of G'."):
            delta = 1e-5
            difference = (laplace_G_prime(z + delta, CONTOUR)
                          - laplace_G_prime(z - delta, CONTOUR)) / (2 * delta)
            self.assertion.assert_close(laplace_moment(z, CONTOUR, 2), difference, rel_tol=1e-5)

        with self.allure.step_with_log("Step3: the strip bound applies to every moment."):
            self.assertion.assert_raises(DomainViolation, laplace_moment, 2.5j, CONTOUR, 2)

    @allure.description("G(z+1) = e^(-2 pi i z) G'(z) / (2 pi i) on sample points")
    def test_functional_equation(self):
        with self.allure.step_with_log(f"Step1: residuals at {SAMPLE_POINTS}."):
            reports = verify_functional_equation(SAMPLE_POINTS, CONTOUR)
            self.assertion.assert_equal(len(reports), len(SAMPLE_POINTS))
            for report in reports:
                self.logger.info(f"{report.z}: lhs {report.lhs}, rhs {report.rhs}")
                self.assertion.assert_less_equal(report.rel_residual, FUNCTIONAL_EQ_TOL)

        with self.allure.step_with_log("Step2: CSV rows carry (re z, im z, residual)."):
            rows = functional_equation_rows(reports)
            self.assertion.assert_equal(rows[2][:2], [0.7, -0.2])

    @pytest.mark.slow
    @allure.description("G(z+1) = e^(-2 pi i z) G'(z) / (2 pi i) on the 5x5 grid")
    def test_functional_equation_grid(self):
        grid = [complex(re, im) for re, im in itertools.product(GRID_RE, GRID_IM)]
        with self.allure.step_with_log("Step1: residuals over the 25 grid points."):
            reports = verify_functional_equation(grid, CONTOUR)
            worst = max(report.rel_residual for report in reports)
            self.logger.info(f"worst grid residual {worst:.3e}")
            self.assertion.assert_less_equal(worst, FUNCTIONAL_EQ_TOL)

    @allure.description("G is not a multiple of exp(exp(2 pi i z))")
    def test_nontriviality(self):
        with self.allure.step_with_log("Step1: the ratio to the trivial solution moves."):
            self.assertion.assert_greater(nontriviality_check(0j, 0.25 + 0j, CONTOUR), 1e-4)
            self.assertion.assert_greater(nontriviality_check(0j, 0.5 + 0j, CONTOUR), 1e-4)
        with self.allure.step_with_log("Step2: equal points give 0."):
            self.assertion.assert_equal(nontriviality_check(0.3j, 0.3j, CONTOUR), 0.0)

    @pytest.mark.parametrize("z", [0.3 + 0.1j, 0j, 0.5 - 0.25j])
    @allure.description("Integrals over C and C - 1 agree")
    def test_contour_translation(self, z):
        with self.allure.step_with_log(f"Step1: translate the contour at z = {z}."):
            self.assertion.assert_less_equal(contour_translation_check(z, CONTOUR), 1e-8)

    @allure.description("G agrees with its own Taylor germ")
    def test_taylor_germ(self):
        germ = laplace_taylor_germ(TAYLOR_CENTER, TAYLOR_ORDER, CONTOUR)
        with self.allure.step_with_log("Step1: the germ is entire with G(z0) in front."):
            self.assertion.assert_equal(germ.radius_hint, math.inf)
            self.assertion.assert_close(germ.coeffs[0], laplace_G(TAYLOR_CENTER, CONTOUR),
                                        abs_tol=1e-12)

        with self.allure.step_with_log("Step2: agreement on |z - z0| = 0.2."):
            for angle in np.linspace(0.0, 2.0 * math.pi, 6, endpoint=False):
                z = TAYLOR_CENTER + 0.2 * cmath.exp(1j * angle)
                self.assertion.assert_close(eval_germ(germ, z), laplace_G(z, CONTOUR),
                                            abs_tol=1e-6)

    @allure.description("The integrand is dominated by exp(-2 pi t^2)")
    def test_decay_fit(self):
        with self.allure.step_with_log("Step1: fit A and B over [-6, 6]."):
            fit = integrand_decay_fit(0j, CONTOUR, 6.0)
            self.logger.info(f"A = {fit.A:.4f}, B = {fit.B:.4f}")
            self.assertion.assert_true(math.isfinite(fit.A) and math.isfinite(fit.B))
            self.assertion.assert_true(fit.gaussian_dominant)
            self.assertion.assert_equal(fit.t_max, 6.0)
