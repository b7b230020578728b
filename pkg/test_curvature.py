"""
Test cases for Weyl-like tensors, quadratic fields and the glued field.
"""
import math
import unittest
from fractions import Fraction

import numpy as np

from curvature import (
    PerturbationSpec,
    WeylLike,
    analytic_bound_constant,
    block_weyl,
    cutoff_chi,
    dyadic_profile,
    glued_field,
    glued_parameters,
    h_field,
    hbar_field,
    log_sup_h_bound,
    nondegeneracy_scalar,
    perturbation_bound_constant,
    perturbation_h,
    random_weyl,
    smallness_exponent,
    smallness_report,
    support_overlaps,
    support_radius,
    t_matrix,
    weyl_invariant_check,
)
from errors import ConfigError, DegenerateDimensionError
from reduction import ReductionPolynomial


class TestRandomWeyl(unittest.TestCase):
    """Test seeded algebraic Weyl tensors."""

    def test_symmetries_and_traces(self):
        """Riemann symmetries and vanishing traces hold to roundoff."""
        for m in (4, 5, 6):
            for seed in range(5):
                report = weyl_invariant_check(random_weyl(m, seed))
                self.assertLess(report.max_symmetry_violation, 1e-13)
                self.assertLess(report.max_trace, 1e-13)
                self.assertGreater(report.nondegeneracy_scalar, 0.0)

    def test_unit_frobenius_norm(self):
        W = random_weyl(5, 3)
        self.assertAlmostEqual(float(np.linalg.norm(W.components)), 1.0, places=13)

    def test_seed_reproducible(self):
        """Same seed, same tensor."""
        a = random_weyl(4, 11).components
        b = random_weyl(4, 11).components
        self.assertTrue(np.array_equal(a, b))

    def test_fault_injection_detected(self):
        """Perturbing one component breaks the symmetry check."""
        W = random_weyl(4, 0)
        broken = W.components.copy()
        broken[0, 1, 2, 3] += 1e-3
        report = weyl_invariant_check(WeylLike(4, broken))
        self.assertGreater(report.max_symmetry_violation, 5e-4)

    def test_degenerate_dimension(self):
        """Weyl tensors vanish for m <= 3."""
        with self.assertRaises(DegenerateDimensionError):
            random_weyl(3, 0)

    def test_components_read_only(self):
        W = random_weyl(4, 0)
        with self.assertRaises(ValueError):
            W.components[0, 0, 0, 0] = 1.0

    def test_json_round_trip(self):
        """A serialized tensor reloads with identical components and support."""
        W = block_weyl(9, 2)
        back = WeylLike.from_json(W.to_json())
        self.assertEqual(back.m, 9)
        self.assertEqual(back.support, W.support)
        self.assertTrue(np.array_equal(back.components, W.components))


class TestInvariants(unittest.TestCase):
    """Test N(W) and the T matrix."""

    def test_t_matrix_psd_with_trace_n(self):
        """T is symmetric positive semidefinite with trace N."""
        W = random_weyl(6, 4)
        T = t_matrix(W)
        self.assertTrue(np.allclose(T, T.T, atol=1e-14))
        self.assertGreaterEqual(float(np.linalg.eigvalsh(T).min()), -1e-13)
        self.assertAlmostEqual(float(np.trace(T)), nondegeneracy_scalar(W), places=12)

    def test_block_embedding_preserves_scalar(self):
        """Zero extension keeps N(W) and pads T with zeros."""
        block = random_weyl(4, 1)
        W = block_weyl(61, 1)
        self.assertAlmostEqual(nondegeneracy_scalar(W), nondegeneracy_scalar(block), places=14)
        T = t_matrix(W)
        self.assertEqual(T.shape, (61, 61))
        self.assertEqual(float(np.abs(T[4:, :]).max()), 0.0)

    def test_negated_same_scalar(self):
        W = random_weyl(5, 6)
        self.assertAlmostEqual(nondegeneracy_scalar(W.negated()), nondegeneracy_scalar(W), places=14)


class TestQuadraticFields(unittest.TestCase):
    """Test H and H-bar."""

    def test_h_symmetric_tangential_traceless(self):
        """H is symmetric, trace-free and has no normal components."""
        W = random_weyl(5, 2)
        rng = np.random.default_rng(0)
        x = rng.standard_normal(6)
        H = h_field(x, W)
        self.assertTrue(np.allclose(H, H.T, atol=1e-14))
        self.assertAlmostEqual(float(np.trace(H)), 0.0, places=13)
        self.assertTrue(np.all(H[-1, :] == 0.0))
        # H(x) x' = 0 by antisymmetry in the last pair
        self.assertLess(float(np.abs(H[:5, :5] @ x[:5]).max()), 1e-13)

    def test_h_divergence_free(self):
        """Central differences of H_ib summed over i vanish for every b."""
        W = random_weyl(7, 4)
        rng = np.random.default_rng(1)
        x = rng.standard_normal(8)
        step = 1e-3
        div = np.zeros(8)
        for i in range(7):
            e = np.zeros(8)
            e[i] = step
            div += (h_field(x + e, W)[i] - h_field(x - e, W)[i]) / (2 * step)
        self.assertLess(float(np.abs(div).max()), 1e-10)

    def test_h_ignores_normal_coordinate(self):
        W = random_weyl(7, 4)
        x = np.linspace(-0.4, 0.6, 8)
        shifted = x.copy()
        shifted[-1] += 2.5
        self.assertTrue(np.array_equal(h_field(x, W), h_field(shifted, W)))

    def test_hbar_with_constant_profile(self):
        """f = 1 reproduces H."""
        W = random_weyl(11, 5)
        x = np.linspace(-0.5, 0.5, 12)
        x[-1] = 0.3
        Hbar = hbar_field(x, W, ReductionPolynomial.constant(1.0))
        self.assertTrue(np.allclose(Hbar, h_field(x, W), atol=1e-15))

    def test_hbar_degree_constraint(self):
        """d < (n-6)/4 is enforced."""
        W = random_weyl(9, 0)
        with self.assertRaises(ConfigError):
            hbar_field(np.zeros(10), W, ReductionPolynomial.linear(1.0))


class TestCutoffAndPerturbation(unittest.TestCase):
    """Test chi and the localized perturbation."""

    def test_cutoff_values(self):
        self.assertEqual(cutoff_chi(0.5), 1.0)
        self.assertEqual(cutoff_chi(1.0), 1.0)
        self.assertEqual(cutoff_chi(2.0), 0.0)
        self.assertAlmostEqual(cutoff_chi(1.5), 0.5, places=15)

    def test_cutoff_monotone(self):
        ts = np.linspace(0.0, 2.5, 251)
        vals = [cutoff_chi(float(t)) for t in ts]
        self.assertTrue(all(a >= b for a, b in zip(vals, vals[1:])))

    def test_perturbation_vanishes_outside(self):
        """h vanishes beyond min(2 rho, 1)."""
        W = random_weyl(11, 0)
        spec = PerturbationSpec(W, ReductionPolynomial.linear(2.0), mu=0.5, lam=0.1, rho=0.2)
        x = np.zeros(12)
        x[0] = 0.45
        self.assertEqual(float(np.abs(perturbation_h(x, spec)).max()), 0.0)

    def test_perturbation_parameter_ranges(self):
        W = random_weyl(11, 0)
        f = ReductionPolynomial.linear(2.0)
        with self.assertRaises(ConfigError):
            PerturbationSpec(W, f, mu=0.5, lam=0.3, rho=0.2)
        with self.assertRaises(ConfigError):
            PerturbationSpec(W, f, mu=1.5, lam=0.1, rho=0.2)

    def test_perturbation_inside_inner_ball(self):
        """On B_rho, h = mu lambda^{2d} f(lambda^{-2}|x'|^2) H(x)."""
        W = random_weyl(11, 1)
        f = ReductionPolynomial.linear(5.0)
        spec = PerturbationSpec(W, f, mu=0.5, lam=0.1, rho=0.2)
        rng = np.random.default_rng(2)
        for _ in range(5):
            x = rng.standard_normal(12)
            x[-1] = abs(x[-1])
            x *= 0.15 / np.linalg.norm(x)
            s = float(np.dot(x[:-1], x[:-1])) / 0.01
            expected = 0.5 * 0.01 * float(f(s)) * h_field(x, W)
            self.assertTrue(np.allclose(perturbation_h(x, spec), expected, rtol=1e-13, atol=0.0))

    def test_perturbation_even(self):
        W = random_weyl(11, 1)
        spec = PerturbationSpec(W, ReductionPolynomial.linear(2.0), mu=0.5, lam=0.1, rho=0.2)
        rng = np.random.default_rng(4)
        for radius in (0.05, 0.25, 0.35):
            x = rng.standard_normal(12)
            x *= radius / np.linalg.norm(x)
            self.assertTrue(np.array_equal(perturbation_h(x, spec), perturbation_h(-x, spec)))

    def test_bound_constant_below_analytic(self):
        """0 < measured C <= |W|_F max |a_i|."""
        W = random_weyl(11, 0)
        spec = PerturbationSpec(W, ReductionPolynomial.linear(2.0), mu=0.5, lam=0.01, rho=0.2)
        measured = perturbation_bound_constant(spec, samples=200, seed=1)
        self.assertGreater(measured, 0.0)
        self.assertLessEqual(measured, analytic_bound_constant(spec) * (1 + 1e-12))
        self.assertAlmostEqual(analytic_bound_constant(spec), 2.0, places=12)

    def test_smallness_report(self):
        W = random_weyl(11, 0)
        spec = PerturbationSpec(W, ReductionPolynomial.linear(2.0), mu=0.5, lam=0.1, rho=0.2)
        report = smallness_report(spec, samples=16, seed=3)
        self.assertEqual(report.log_smallness, smallness_exponent(0.5, 0.1, 0.2, 12))
        self.assertEqual(report.log_sup_h_bound, log_sup_h_bound(spec))
        self.assertTrue(report.within_bound)
        self.assertGreater(report.sup_total, 0.0)
        self.assertEqual(report, smallness_report(spec, samples=16, seed=3))

    def test_smallness_bound_at_glued_parameters(self):
        """At N = 30 the sampled sup |h| stays under mu (2 lambda^2 + R^2) R^2."""
        lam, rho, mu = glued_parameters(30)
        spec = PerturbationSpec(random_weyl(11, 2), ReductionPolynomial.linear(2.0), mu=mu, lam=lam, rho=rho)
        report = smallness_report(spec, samples=16, seed=0)
        R = 2 * rho
        expected = math.log(mu * (2.0 * lam ** 2 + R ** 2) * R ** 2)
        self.assertAlmostEqual(report.log_sup_h_bound, expected, places=9)
        self.assertGreater(report.sup_h, 0.0)
        self.assertTrue(report.within_bound)

    def test_smallness_report_needs_linear_profile(self):
        W = random_weyl(11, 0)
        spec = PerturbationSpec(W, ReductionPolynomial.constant(), mu=0.5, lam=0.1, rho=0.2)
        with self.assertRaises(ConfigError):
            smallness_report(spec, samples=4)


class TestGluedField(unittest.TestCase):
    """Test support disjointness and the smallness exponent."""

    def test_classical_scale_overlaps_by_exact_amount(self):
        """With kappa = 4 neighbours overlap by exactly 1/(2N^2(N+1)^2)."""
        for N in range(2, 40):
            excess = (support_radius(N, 4) + support_radius(N + 1, 4)
                      - (Fraction(1, N) - Fraction(1, N + 1)))
            self.assertEqual(excess, Fraction(1, 2 * N * N * (N + 1) ** 2))
        self.assertEqual(len(support_overlaps(2, 100, 4.0)), 98)

    def test_default_scale_is_disjoint(self):
        """kappa = 5 gives pairwise disjoint supports."""
        self.assertEqual(support_overlaps(2, 10 ** 4, 5.0), [])

    def test_glued_field_rejects_overlap(self):
        W = random_weyl(11, 0)
        f = ReductionPolynomial.linear(2.0)
        with self.assertRaises(ConfigError):
            glued_field(np.zeros(12), W, f, 2, cutoff_scale=4.0)
        with self.assertRaises(ConfigError):
            glued_field(np.zeros(12), W, f, 1)

    def test_glued_field_single_term_at_centre(self):
        """At x_N only the N-th term is active and equals 2^{-N} f(0) H(0) = 0."""
        W = random_weyl(11, 0)
        f = ReductionPolynomial.linear(2.0)
        x = np.zeros(12)
        x[0] = 1.0 / 7
        self.assertLess(float(np.abs(glued_field(x, W, f, 2)).max()), 1e-30)

    def test_glued_field_matches_single_term(self):
        """Near x_N the sum reduces to one translated H-bar term."""
        W = random_weyl(11, 3)
        f = ReductionPolynomial.linear(2.0)
        N = 6
        offset = np.zeros(12)
        offset[1] = 0.002
        offset[-1] = 0.001
        x = offset.copy()
        x[0] += 1.0 / N
        s = 2.0 ** N * float(np.dot(offset[:-1], offset[:-1]))
        expected = 2.0 ** (-N) * float(f(s)) * h_field(offset, W)
        self.assertTrue(np.allclose(glued_field(x, W, f, 2), expected, rtol=1e-12, atol=0.0))

    def test_glued_field_far_along_the_sequence(self):
        """At N = 2000 the dyadic scaling neither overflows nor loses the linear term."""
        W = random_weyl(11, 0)
        f = ReductionPolynomial.linear(2.0)
        N = 2000
        x = np.zeros(12)
        x[0] = 1.0 / N
        self.assertEqual(float(np.abs(glued_field(x, W, f, 2)).max()), 0.0)
        offset = np.zeros(12)
        offset[1] = 1e-8
        offset[2] = -2e-8
        x = x + offset
        s = float(np.dot(offset[:-1], offset[:-1]))
        t = 5.0 * N * N * float(np.linalg.norm(offset))
        expected = cutoff_chi(t) * (math.ldexp(2.0, -N) - s) * h_field(offset, W)
        field = glued_field(x, W, f, 2)
        self.assertGreater(float(np.abs(field).max()), 0.0)
        self.assertTrue(np.allclose(field, expected, rtol=1e-12, atol=0.0))

    def test_dyadic_profile_matches_direct_scaling(self):
        f = ReductionPolynomial((0.5, -1.0, 3.0))
        for N in (1, 6, 20):
            s = 1e-3
            direct = 2.0 ** (-N) * float(f(2.0 ** N * s))
            self.assertAlmostEqual(dyadic_profile(f, N, s), direct, delta=1e-12 * abs(direct))
        linear = ReductionPolynomial.linear(2.0)
        self.assertEqual(dyadic_profile(linear, 4000, 0.25), -0.25)

    def test_smallness_exponent_at_20(self):
        """log(mu^-2 lambda^52 rho^-60) at N = 20, n = 62."""
        lam, rho, mu = glued_parameters(20)
        expected = 40 * math.log(2) - 520 * math.log(2) + 120 * math.log(40)
        self.assertAlmostEqual(smallness_exponent(mu, lam, rho, 62), expected, places=9)


if __name__ == "__main__":
    unittest.main()
