"""
Test cases for the warped-product non-uniqueness example.
"""
import json
import math
import unittest

import numpy as np

from errors import DomainError
from nonuniq import (
    REFERENCE_SPEC,
    WarpedProductSpec,
    bubble_boundary_residual,
    bubble_total_energy,
    bubble_total_energy_quadrature,
    energy_gap,
    energy_of_one,
    sc_infinity,
    sc_of_k,
    stereographic_volume_check,
    threshold_k,
    warped_invariants,
)


class TestInvariants(unittest.TestCase):
    """Test R_g, h_g and T_c as functions of k."""

    def test_reference_at_k4(self):
        inv = warped_invariants(REFERENCE_SPEC, 4.0)
        self.assertAlmostEqual(inv.R_g, 3.5, places=14)
        self.assertAlmostEqual(inv.h_g, 1.0, places=14)
        self.assertAlmostEqual(inv.T_c, -0.5, places=14)
        self.assertLess(inv.bubble_shift, 0.0)

    def test_energy_of_one_closed_form(self):
        """I[1] = (2/5)(6/k + 2) k^{3/2} + 4 k^{1/2} for the reference spec."""
        k = 9.0
        expected = 0.4 * (6.0 / k + 2.0) * k ** 1.5 + 4.0 * math.sqrt(k)
        self.assertAlmostEqual(energy_of_one(REFERENCE_SPEC, k), expected, places=11)

    def test_invalid_spec(self):
        with self.assertRaises(DomainError):
            WarpedProductSpec(2, 2, 6.0, 2.0, 2.0, 1.0, 1.0, 1.0)
        with self.assertRaises(DomainError):
            WarpedProductSpec(3, 2, -6.0, 2.0, 2.0, 1.0, 1.0, 1.0)
        with self.assertRaises(DomainError):
            warped_invariants(REFERENCE_SPEC, 0.0)


class TestStereographicVolume(unittest.TestCase):
    """Test which sphere measure the volume identity uses."""

    def test_sphere_n_convention(self):
        for n in (5, 6):
            self.assertLess(stereographic_volume_check(n), 1e-8)

    def test_other_convention_falsified(self):
        self.assertGreater(stereographic_volume_check(4, "sphere_n_minus_1"), 0.1)
        self.assertGreater(stereographic_volume_check(5, "sphere_n_minus_1"), 0.1)
        self.assertGreater(stereographic_volume_check(6, "sphere_n_minus_1"), 0.05)

    def test_dimension_range(self):
        with self.assertRaises(DomainError):
            stereographic_volume_check(3)
        with self.assertRaises(DomainError):
            stereographic_volume_check(5, "sphere_n_plus_1")


class TestBubbleEnergy(unittest.TestCase):
    """Test S_c(k) and the boundary condition of the shifted bubble."""

    def test_closed_against_quadrature(self):
        for R_g, h_g in ((3.5, 1.0), (2.0, 0.0), (8.0, 2.0)):
            closed = bubble_total_energy(R_g, h_g, 5)
            res = bubble_total_energy_quadrature(R_g, h_g, 5)
            self.assertTrue(res.converged)
            self.assertLess(abs(res.value - closed) / closed, 1e-7)

    def test_flat_boundary_matches_limit(self):
        """h_g = 0 and R_g = R_g2 reproduce S_c(inf)."""
        spec = WarpedProductSpec(3, 2, 6.0, 2.0, 2.0, 1.0, 1.0, 1.0)
        n = spec.n
        energy = bubble_total_energy(2.0, 0.0, n)
        self.assertAlmostEqual(energy / sc_infinity(spec), 1.0, places=9)

    def test_boundary_condition(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            xb = rng.standard_normal(4)
            self.assertLess(abs(bubble_boundary_residual(3.5, 1.0, 5, xb)), 1e-12)

    def test_sc_approaches_limit(self):
        """S_c(k) is within 1% of S_c(inf) at k = 1e6."""
        limit = sc_infinity(REFERENCE_SPEC)
        self.assertLess(abs(sc_of_k(REFERENCE_SPEC, 1e6) - limit) / limit, 0.01)

    def test_dimension_guard(self):
        with self.assertRaises(DomainError):
            bubble_total_energy(1.0, 1.0, 4)


class TestThreshold(unittest.TestCase):
    """Test the threshold search."""

    def test_threshold_found(self):
        report = threshold_k(REFERENCE_SPEC)
        self.assertTrue(report.found)
        self.assertGreater(report.margin, 1.0)
        self.assertTrue(report.exceeds_sc_infinity)
        below = report.threshold_k / 1.002
        sc_inf = sc_infinity(REFERENCE_SPEC)
        self.assertFalse(energy_gap(REFERENCE_SPEC, below) > 1.0
                         and energy_of_one(REFERENCE_SPEC, below) > sc_inf + 1.0)

    def test_early_crossing_is_not_the_threshold(self):
        """I[1] - S_c(k) > 1 at k = 1 but dips negative again before the threshold."""
        self.assertGreater(energy_gap(REFERENCE_SPEC, 1.0), 1.0)
        self.assertLess(energy_gap(REFERENCE_SPEC, 10.0), 0.0)
        self.assertGreater(threshold_k(REFERENCE_SPEC).threshold_k, 10.0)

    def test_gap_grows_past_threshold(self):
        report = threshold_k(REFERENCE_SPEC)
        gap10 = energy_gap(REFERENCE_SPEC, 10.0 * report.threshold_k)
        self.assertGreater(gap10, 1.0)
        self.assertGreater(gap10, report.margin)

    def test_threshold_json(self):
        data = json.loads(threshold_k(REFERENCE_SPEC).to_json())
        self.assertEqual(data["spec"]["n1"], 3)
        self.assertGreater(data["threshold_k"], 1.0)

    def test_not_found_below_cap(self):
        report = threshold_k(REFERENCE_SPEC, k_max=1.0)
        self.assertFalse(report.found)
        self.assertIsNone(report.margin)


if __name__ == "__main__":
    unittest.main()
