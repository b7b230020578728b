"""
Test cases for the reduced energy polynomials and the critical-dimension certificates.
"""
import unittest
from fractions import Fraction

from errors import ConfigError, DomainError, NoRealRootError
from reduction import (
    I_of_s,
    J_of_s,
    ReductionPolynomial,
    a0_star,
    alpha_coeffs,
    beta_coeffs,
    bound_certificate,
    certificate_scan,
    construct_f,
    dimension_row,
    discriminant,
    discriminant_lower_bound,
    i1_closed_display,
    i1_lower_bound,
    i_critical_points,
    i_polynomial,
    ipp1_closed_display,
    ipp_minus_ip_display,
    ipp_upper_bound,
    j1_closed_display,
    j_polynomial,
    local_max_sampling_check,
    minimal_certified_n,
    p_cal,
    p_cal_second_derivative_formula,
    p_n_value,
    q_poly,
    q_poly_expanded,
    q_poly_symbolic,
    ratio_bounds,
    ratio_bounds_violation,
)


class TestProfilePolynomial(unittest.TestCase):
    """Test f(s) = a0 - s and its coefficient transforms."""

    def test_linear_evaluation(self):
        f = ReductionPolynomial.linear(3.0)
        self.assertEqual(f(1.0), 2.0)
        self.assertEqual(f.derivative(5.0), -1.0)
        self.assertEqual(f.d, 1)

    def test_degree_constraint(self):
        """Linear profiles need n > 10."""
        ReductionPolynomial.linear(1.0).check_degree(11)
        with self.assertRaises(ConfigError):
            ReductionPolynomial.linear(1.0).check_degree(10)

    def test_alpha_coefficients_constant(self):
        """For f = 1 only alpha_0 = n+1 survives."""
        self.assertEqual(alpha_coeffs(ReductionPolynomial.constant(), 20), (21.0,))

    def test_beta_coefficients_linear(self):
        """2ff' + sf'^2 = -2a0 + 3s for f = a0 - s."""
        self.assertEqual(beta_coeffs(ReductionPolynomial.linear(3.0)), (-6.0, 3.0))
        self.assertEqual(beta_coeffs(ReductionPolynomial.constant()), ())

    def test_j_vanishes_for_constant_profile(self):
        poly = j_polynomial(30, -1.0, ReductionPolynomial.constant())
        self.assertEqual(float(poly(1.0)), 0.0)


class TestConstruction(unittest.TestCase):
    """Test a0, I and J at the critical dimension."""

    def test_a0_is_root_of_p_n(self):
        a0 = a0_star(62, -1.0)
        self.assertIsNotNone(a0)
        self.assertLess(abs(p_n_value(a0, 62, -1.0)), 1e-10 * a0 * a0)

    def test_critical_point_at_one(self):
        """I'(1) = 0, I(1) > 0, I''(1) < 0 and J(1) < 0 for the constructed f."""
        for T_c in (-0.1, -1.0, -10.0):
            f = construct_f(62, T_c)
            poly = i_polynomial(62, T_c, f, normalized=True)
            self.assertLess(abs(poly.deriv(1)(1.0)), 1e-10 * abs(poly(1.0)))
            self.assertGreater(poly(1.0), 0.0)
            self.assertLess(poly.deriv(2)(1.0), 0.0)
            self.assertLess(j_polynomial(62, T_c, f, normalized=True)(1.0), 0.0)

    def test_pointwise_evaluators(self):
        f = construct_f(62, -1.0)
        poly = i_polynomial(62, -1.0, f)
        self.assertEqual(I_of_s(0.7, 62, -1.0, f), poly(0.7))
        self.assertEqual(I_of_s(0.7, 62, -1.0, f, order=2), poly.deriv(2)(0.7))
        self.assertEqual(J_of_s(0.7, 62, -1.0, f), j_polynomial(62, -1.0, f)(0.7))

    def test_one_is_a_critical_point(self):
        f = construct_f(62, -1.0)
        crit = i_critical_points(62, -1.0, f)
        self.assertTrue(any(abs(s - 1.0) < 1e-8 for s in crit))
        self.assertTrue(local_max_sampling_check(62, -1.0, f))

    def test_closed_display_matches_polynomial(self):
        a0 = a0_star(62, -1.0)
        direct = i_polynomial(62, -1.0, ReductionPolynomial.linear(a0), normalized=True)(1.0)
        display = i1_closed_display(62, -1.0, a0, normalized=True)
        self.assertLess(abs(display - direct) / abs(direct), 1e-10)

    def test_lower_bounds_hold(self):
        """The displayed bounds sit below the exact values."""
        for T_c in (-0.5, -2.0):
            a0 = a0_star(62, T_c)
            self.assertGreater(i1_closed_display(62, T_c, a0, True), i1_lower_bound(62, T_c, True))
            self.assertGreaterEqual(discriminant(62, T_c, True), discriminant_lower_bound(62, T_c, True))

    def test_second_variation_displays(self):
        """I''(1) from its display and from the polynomial agree; I''(1) - I'(1) likewise."""
        for T_c in (-0.1, -1.0, -10.0):
            f = construct_f(62, T_c)
            a0 = f.coeffs[0]
            poly = i_polynomial(62, T_c, f, normalized=True)
            direct = poly.deriv(2)(1.0)
            self.assertLess(abs(ipp1_closed_display(62, T_c, a0, True) - direct) / abs(direct), 1e-11)
            gap = direct - poly.deriv(1)(1.0)
            self.assertLess(abs(ipp_minus_ip_display(62, T_c, a0, True) - gap) / abs(gap), 1e-11)

    def test_second_variation_upper_bound(self):
        """I''(1) <= -((n-1)(n+1)/((n-5)c0)) d(p_n) < 0 at n = 62."""
        for T_c in (-0.1, -1.0, -10.0):
            a0 = a0_star(62, T_c)
            bound = ipp_upper_bound(62, T_c, True)
            self.assertLess(bound, 0.0)
            self.assertLessEqual(ipp1_closed_display(62, T_c, a0, True), bound)
            self.assertLess(ipp1_closed_display(62, T_c, a0), 0.0)

    def test_j1_display_matches_polynomial(self):
        for T_c in (-0.5, -2.0):
            f = construct_f(62, T_c)
            direct = j_polynomial(62, T_c, f, normalized=True)(1.0)
            display = j1_closed_display(62, T_c, normalized=True)
            self.assertLess(display, 0.0)
            self.assertLess(abs(display - direct) / abs(direct), 1e-10)

    def test_a0_needs_n_above_nine(self):
        with self.assertRaises(DomainError):
            a0_star(9, -1.0)

    def test_a0_absent_without_real_root(self):
        """At n = 13 the radicand 9 - 8(n+7)(n-7)c0c2/((n+3)(n-9)c1^2) is negative."""
        self.assertIsNone(a0_star(13, -1.0))
        with self.assertRaises(NoRealRootError):
            construct_f(13, -1.0)
        with self.assertRaises(NoRealRootError):
            j1_closed_display(13, -1.0)

    def test_local_max_away_from_reference_point(self):
        for n in (70, 100):
            for T_c in (-0.3, -4.0):
                f = construct_f(n, T_c)
                self.assertTrue(local_max_sampling_check(n, T_c, f, 0.8, 1.25), (n, T_c))


class TestMomentRatioBounds(unittest.TestCase):
    """Test the two-sided bounds on consecutive c_q ratios."""

    def test_bounds_hold_on_grid(self):
        offsets = [0.01, 0.1, 1.0, 10.0, 100.0]
        self.assertLessEqual(ratio_bounds_violation((25, 40, 62, 120, 200), offsets), 0.0)

    def test_cross_ratio_below_one(self):
        """c_1^2 <= c_0 c_2 by Cauchy-Schwarz."""
        bounds = ratio_bounds(62, -1.0)
        self.assertLess(bounds.cross_ratio, 1.0)
        self.assertEqual(len(bounds.step_ratio), 3)

    def test_below_stated_range(self):
        with self.assertRaises(DomainError):
            ratio_bounds(24, -1.0)


class TestCertificates(unittest.TestCase):
    """Test the exact T_c-independent conditions."""

    def test_q_at_the_threshold(self):
        self.assertEqual(q_poly(62), 2628)
        self.assertEqual(q_poly(61), -544)

    def test_q_expansions_agree(self):
        poly = q_poly_symbolic()
        for n in (25, 61, 62, 200):
            self.assertEqual(q_poly(n), q_poly_expanded(n))
            self.assertEqual(int(poly.eval(n)), q_poly(n))

    def test_p_cal_is_exact(self):
        self.assertIsInstance(p_cal(62), Fraction)
        self.assertGreater(p_cal(62), 0)
        self.assertGreater(p_cal(62, 1), 0)
        self.assertLess(p_cal(61), 0)
        self.assertEqual(p_cal(61), Fraction(37989, 33800) * 64 * 52 * 51 - 68 * 53 ** 2)

    def test_p_cal_second_derivative(self):
        for n in (30, 62, 150):
            self.assertEqual(p_cal(n, 2), p_cal_second_derivative_formula(n))

    def test_minimal_certified_dimension(self):
        self.assertEqual(minimal_certified_n(range(25, 201)), 62)
        self.assertFalse(bound_certificate(61))
        self.assertTrue(all(bound_certificate(n) for n in range(62, 201)))


class TestScan(unittest.TestCase):
    """Test the dimension scan."""

    def test_direct_checks_near_threshold(self):
        result = certificate_scan(range(62, 66), [-0.1, -1.0, -10.0], threads=2)
        self.assertEqual(result.minimal_certified_n, 62)
        self.assertTrue(result.all_direct_ok)
        self.assertEqual([(r.n, r.T_c) for r in result.rows][:3],
                         [(62, -10.0), (62, -1.0), (62, -0.1)])

    def test_scan_range_enforced(self):
        with self.assertRaises(DomainError):
            certificate_scan([5], [-1.0])
        with self.assertRaises(DomainError):
            certificate_scan(range(62, 64), [1.0])

    def test_row_fields(self):
        row = dimension_row(80, -1.0)
        self.assertTrue(row.bound_certificate)
        self.assertTrue(row.direct_ok)
        self.assertGreater(row.c1, row.c0)


if __name__ == "__main__":
    unittest.main()
