"""
Test cases for special functions, quadrature and half-line moments.
"""
import math
import unittest

import numpy as np

from errors import DivergentMomentError, DomainError, SlowConvergenceError
from specfun import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    beta,
    c_q,
    half_line_moment,
    half_line_moment_quadrature,
    half_line_moment_recursion,
    half_line_moment_recursion_check,
    half_line_moment_series,
    monomial_sphere_moment,
    monomial_sphere_moments,
    quad_1d,
    radial_beta_moment,
    sphere_area,
)


class TestBetaAndSphereArea(unittest.TestCase):
    """Test Beta function and sphere measures."""

    def test_beta_half_half(self):
        """B(1/2, 1/2) = pi."""
        self.assertAlmostEqual(beta(0.5, 0.5), math.pi, places=13)

    def test_beta_integers(self):
        """B(2, 3) = 1/12."""
        self.assertAlmostEqual(beta(2.0, 3.0), 1.0 / 12.0, places=14)

    def test_beta_rejects_non_positive(self):
        """Non-positive arguments are a domain error."""
        with self.assertRaises(DomainError):
            beta(0.0, 1.0)

    def test_low_dimensional_spheres(self):
        """|S^1| = 2 pi, |S^2| = 4 pi, |S^3| = 2 pi^2."""
        self.assertAlmostEqual(sphere_area(2), 2 * math.pi, places=12)
        self.assertAlmostEqual(sphere_area(3), 4 * math.pi, places=12)
        self.assertAlmostEqual(sphere_area(4), 2 * math.pi ** 2, places=12)


class TestQuadrature(unittest.TestCase):
    """Test the adaptive Gauss-Kronrod driver."""

    def test_exponential_half_line(self):
        """int_0^inf e^{-x} dx = 1 under both transforms."""
        for transform in ("semi_infinite_rational", "semi_infinite_tan"):
            spec = QuadratureSpec(transform=transform)
            res = quad_1d(lambda x: np.exp(-x), 0.0, math.inf, spec)
            self.assertTrue(res.converged)
            self.assertAlmostEqual(res.value, 1.0, places=11)

    def test_finite_interval_with_breakpoint(self):
        """|x| on [-1, 2] integrates to 5/2 with a kink at 0."""
        res = quad_1d(np.abs, -1.0, 2.0, DEFAULT_QUADRATURE, breakpoints=(0.0,))
        self.assertAlmostEqual(res.value, 2.5, places=13)

    def test_peaked_integrand(self):
        """int_0^inf (1+t^2)^{-60} dt = B(1/2, 119/2)/2 and the estimate covers the error."""
        res = quad_1d(lambda t: (1.0 + t * t) ** -60.0, 0.0, math.inf)
        exact = 0.5 * beta(0.5, 59.5)
        self.assertTrue(res.converged)
        self.assertLess(abs(res.value - exact) / exact, 1e-12)
        self.assertLessEqual(abs(res.value - exact), res.error_estimate)

    def test_result_unpacks(self):
        """QuadratureResult unpacks as (value, error_estimate)."""
        value, error = quad_1d(lambda x: x * x, 0.0, 1.0)
        self.assertAlmostEqual(value, 1.0 / 3.0, places=14)
        self.assertLess(error, 1e-12)

    def test_transform_none_rejects_infinite_limit(self):
        """An infinite limit needs a semi-infinite transform."""
        with self.assertRaises(DomainError):
            quad_1d(lambda x: np.exp(-x), 0.0, math.inf, QuadratureSpec(transform="none"))

    def test_invalid_transform(self):
        """Unknown transform names are rejected at construction."""
        with self.assertRaises(DomainError):
            QuadratureSpec(transform="gauss_laguerre")


class TestHalfLineMoments(unittest.TestCase):
    """Test I_alpha(a) by series, recursion and quadrature."""

    def test_i1_at_one(self):
        """I_1(1) = pi/4."""
        for route in (half_line_moment_series, half_line_moment_recursion,
                      half_line_moment_quadrature):
            self.assertAlmostEqual(route(1.0, 1.0).value, math.pi / 4, places=12)

    def test_i4_at_one(self):
        """I_4(1) = 5 pi/64 - 11/48."""
        expected = 5 * math.pi / 64 - 11.0 / 48.0
        got = half_line_moment(4.0, 1.0).value
        self.assertLess(abs(got - expected) / expected, 1e-12)

    def test_three_routes_agree(self):
        """Series, recursion and quadrature agree to 1e-10 relative."""
        for alpha in (1.5, 10.0, 28.5):
            for a in (0.1, 1.0, 10.0):
                series = half_line_moment_series(alpha, a).log_value
                recursion = half_line_moment_recursion(alpha, a).log_value
                quadrature = half_line_moment_quadrature(alpha, a).log_value
                self.assertLess(abs(math.expm1(series - quadrature)), 1e-10)
                self.assertLess(abs(math.expm1(recursion - quadrature)), 1e-10)

    def test_recursion_identity(self):
        """The downward recursion holds between quadrature moments."""
        for alpha, a in ((2.5, 0.5), (7.0, 2.0)):
            residual = half_line_moment_recursion_check(alpha, a)
            self.assertLess(residual, 1e-11 * half_line_moment(alpha, a).value)

    def test_series_refuses_small_offset(self):
        """The series route is not used at or below the switchover."""
        with self.assertRaises(SlowConvergenceError):
            half_line_moment_series(2.0, 0.01)

    def test_dispatch_uses_quadrature_near_zero(self):
        """Small offsets, including a = 0, go to quadrature."""
        moment = half_line_moment(2.0, 0.0)
        self.assertEqual(moment.method, "quadrature")
        # I_2(0) = pi/4
        self.assertAlmostEqual(moment.value, math.pi / 4, places=11)

    def test_divergent_alpha(self):
        """alpha <= 1/2 diverges."""
        with self.assertRaises(DivergentMomentError):
            half_line_moment(0.5, 1.0)

    def test_c_q_preconditions(self):
        """c_q needs n - 5 - 2q > 1 and T_c < 0."""
        with self.assertRaises(DivergentMomentError):
            c_q(8, -1.0, 1)
        with self.assertRaises(DomainError):
            c_q(62, 0.0, 0)

    def test_c_q_increasing_in_q(self):
        """c_{q+1} > c_q, the weight (1+(t-T_c)^2) growing with q."""
        values = [c_q(62, -1.0, q).log_value for q in range(3)]
        self.assertLess(values[0], values[1])
        self.assertLess(values[1], values[2])


class TestSphereMoments(unittest.TestCase):
    """Test exact monomial moments on spheres."""

    def test_second_moment_on_s2(self):
        """int_{S^2} x_1^2 = 4 pi / 3."""
        self.assertAlmostEqual(monomial_sphere_moment(3, [2, 0, 0]), 4 * math.pi / 3, places=12)

    def test_odd_exponent_vanishes(self):
        """Any odd exponent gives zero."""
        self.assertEqual(monomial_sphere_moment(4, [1, 2, 0, 0]), 0.0)

    def test_zero_exponents_give_area(self):
        """The constant monomial integrates to |S^{m-1}|."""
        self.assertAlmostEqual(monomial_sphere_moment(5, [0] * 5), sphere_area(5), places=12)

    def test_vectorized_matches_scalar(self):
        """The vectorized routine agrees with the scalar one."""
        exps = np.array([[4, 0, 2, 0], [2, 2, 2, 2], [1, 1, 0, 0]])
        batch = monomial_sphere_moments(4, exps)
        for row, value in zip(exps, batch):
            self.assertAlmostEqual(value, monomial_sphere_moment(4, row), places=14)

    def test_absolute_moment(self):
        """int_{S^1} |x_1| = 4."""
        self.assertAlmostEqual(monomial_sphere_moment(2, [1.0, 0.0], absolute=True), 4.0, places=12)

    def test_radial_beta_moment(self):
        """int_0^inf r^2 (1+r^2)^{-3} dr = pi/16."""
        self.assertAlmostEqual(radial_beta_moment(2, 3, 1.0), math.pi / 16, places=13)


if __name__ == "__main__":
    unittest.main()
