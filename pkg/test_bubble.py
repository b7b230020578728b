"""
Test cases for the half-space bubble, its residuals and kernel functions.
"""
import unittest

import numpy as np

from bubble import (
    BubbleParams,
    boundary_residual,
    bubble_check,
    derivative_check,
    einstein_residual,
    eval_bubble,
    eval_kernel,
    interior_residual,
    kernel_norm_constancy,
    kernel_proportionality,
    random_points,
)
from errors import DomainError


class TestBubbleEvaluation(unittest.TestCase):
    """Test u_(xi,eps) at reference points."""

    def test_reference_value(self):
        """n=4, T_c=-1, xi=0, eps=1 gives u(0) = 1/2."""
        p = BubbleParams.centred(4, -1.0)
        self.assertAlmostEqual(eval_bubble(p, np.zeros(4)), 0.5, places=15)

    def test_peak_below_boundary(self):
        p = BubbleParams(5, -2.0, [0.1, 0.2, 0.3, 0.4], 0.5)
        self.assertTrue(np.allclose(p.peak, [0.1, 0.2, 0.3, 0.4, -1.0]))

    def test_invalid_parameters(self):
        with self.assertRaises(DomainError):
            BubbleParams.centred(5, 0.5)
        with self.assertRaises(DomainError):
            BubbleParams.centred(5, -1.0, eps=0.0)
        with self.assertRaises(DomainError):
            BubbleParams(5, -1.0, np.zeros(3), 1.0)

    def test_outside_half_space(self):
        p = BubbleParams.centred(5, -1.0)
        with self.assertRaises(DomainError):
            eval_bubble(p, np.array([0.0, 0.0, 0.0, 0.0, -0.1]))


class TestResiduals(unittest.TestCase):
    """Test the Yamabe equation, boundary condition and Einstein identity."""

    def test_residuals_vanish(self):
        """All residuals at roundoff for n in {5, 13, 62}."""
        for n in (5, 13, 62):
            p = BubbleParams(n, -1.3, np.linspace(-1, 1, n - 1), 0.7)
            for x in random_points(p, 25, seed=n):
                self.assertLess(abs(interior_residual(p, x)), 1e-9)
                self.assertLess(abs(boundary_residual(p, x[:-1])), 1e-9)
                self.assertLess(float(np.abs(einstein_residual(p, x)).max()), 1e-9)

    def test_derivatives_match_differences(self):
        p = BubbleParams.centred(13, -1.0)
        for x in random_points(p, 5, seed=1):
            self.assertLess(derivative_check(p, x), 1e-6)

    def test_bubble_check_passes(self):
        report = bubble_check(13, -0.5, eps=2.0, samples=30, seed=4)
        self.assertTrue(report.passed())
        self.assertEqual(report.samples, 30)

    def test_interior_residual_needs_interior_point(self):
        p = BubbleParams.centred(5, -1.0)
        with self.assertRaises(DomainError):
            interior_residual(p, np.zeros(5))


class TestKernels(unittest.TestCase):
    """Test the linearized kernel functions."""

    def test_tangential_kernel_vanishes_on_symmetry_plane(self):
        """u_(xi,eps,a) = 0 where x_a = xi_a, a < n."""
        p = BubbleParams(6, -1.0, [0.3, -0.2, 0.0, 1.0, 0.5], 1.5)
        x = np.array([0.3, 1.0, 2.0, -1.0, 0.0, 0.4])
        self.assertEqual(eval_kernel(p, 1, "interior", x), 0.0)
        self.assertEqual(eval_kernel(p, 1, "boundary_hat", x), 0.0)

    def test_kernels_are_parameter_derivatives(self):
        """Kernels agree with scaled parameter derivatives of u."""
        p = BubbleParams(7, -0.8, np.array([0.1, 0.0, -0.3, 0.2, 0.0, 0.4]), 1.2)
        for x in random_points(p, 5, seed=2):
            for a in (1, 4, 7):
                self.assertLess(kernel_proportionality(p, x, a), 1e-6)

    def test_kernel_index_range(self):
        p = BubbleParams.centred(5, -1.0)
        with self.assertRaises(DomainError):
            eval_kernel(p, 0, "interior", np.ones(5))
        with self.assertRaises(DomainError):
            eval_kernel(p, 6, "interior", np.ones(5))
        with self.assertRaises(DomainError):
            eval_kernel(p, 1, "exterior", np.ones(5))


class TestKernelNorms(unittest.TestCase):
    """Test invariance of kernel norms under translation and dilation."""

    def test_norms_constant_at_13(self):
        params = [((0.0,) * 12, 1.0), ((0.3,) * 12, 3.0), ((0.0,) * 12, 0.5)]
        for a in (1, 13):
            report = kernel_norm_constancy(13, -1.0, params, a)
            self.assertTrue(report.converged)
            self.assertLess(report.max_spread, 1e-6)
            self.assertTrue(all(v > 0 for v in report.interior_norms))

    def test_low_dimension_rejected(self):
        with self.assertRaises(DomainError):
            kernel_norm_constancy(4, -1.0, [((0.0,) * 3, 1.0)])


if __name__ == "__main__":
    unittest.main()
