import math
import unittest

from stmreg.models import ParameterError, QuadratureSpec
from stmreg.kernels import (
    KernelMethod, QuadratureError, CLOSED_FORM_MAX_P, cosh_ratio, sinh_ratio, quad_checked,
    s_off, s_reg, s_off_closed, s_reg_closed, s_off_auto, s_reg_auto, reg_profile,
    s_off_one_at_zero, arcsine_moment, kernel_routes_report, legendre_cosh_identity_check
)
from tests.helpers import assert_passed


class KernelExamplesTestCase(unittest.TestCase):

    def test_off_examples(self):
        for M in (0.5, 1.0, 10.0):
            self.assertAlmostEqual(s_off_one_at_zero(M), s_off(1, 0.0, M).value, delta=1e-10)
        self.assertAlmostEqual(-2.0 * math.pi / 3.0, s_off(0, 0.0, 1.0).value, places=10)
        self.assertAlmostEqual(-2.0 * math.pi / 3.0, s_off_closed(0, 0.0, 1.0).value, places=12)
        self.assertAlmostEqual(-math.pi, s_off_closed(0, 0.0, 1e-8).value, delta=1e-3)

    def test_off_ell_two_vanishes_for_heavy_impurity(self):
        values = [abs(s_off_closed(2, 0.0, M).value) for M in (1.0, 10.0, 100.0, 1000.0)]
        self.assertTrue(all(b < a for a, b in zip(values, values[1:])))
        self.assertLess(values[-1], 1e-5)

    def test_reg_examples(self):
        self.assertAlmostEqual(math.tanh(math.pi), s_reg(0, 2.0, 1.0).value, places=11)
        self.assertAlmostEqual(math.pi, s_reg_closed(0, 0.0, 1.0).value, places=14)
        self.assertAlmostEqual(4.0 / math.pi, s_reg(1, 0.0, 1.0).value, places=11)
        self.assertAlmostEqual(math.pi / 4.0, s_reg_closed(2, 0.0, 1.0).value, places=14)
        self.assertAlmostEqual(0.8 * math.tanh(math.pi / 2.0), s_reg_closed(2, 1.0, 1.0).value, places=14)
        self.assertAlmostEqual(0.73372, s_reg_closed(2, 1.0, 1.0).value, delta=1e-5)

    def test_methods_and_errors(self):
        closed = s_off_closed(2, 1.0, 1.0)
        self.assertIs(KernelMethod.closed_form, closed.method)
        self.assertGreaterEqual(closed.abs_error, 0.0)
        quad = s_off(3, 1.0, 1.0)
        self.assertIs(KernelMethod.quadrature, quad.method)
        self.assertGreaterEqual(quad.abs_error, 0.0)
        self.assertEqual(0.0, s_reg_closed(4, 2.0, 1.0).abs_error)

    def test_arcsine_moment(self):
        self.assertAlmostEqual(math.pi, arcsine_moment(0), places=15)
        self.assertAlmostEqual(math.pi / 4.0, arcsine_moment(2), places=15)
        self.assertEqual(0.0, arcsine_moment(3))


class KernelPropertiesTestCase(unittest.TestCase):
    ells = (0, 2, 4, 6)
    ps = (0.0, 0.5, 1.0, 3.0, 10.0)
    masses = (0.1, 1.0, 10.0)

    def test_route_equivalence(self):
        for ell in self.ells:
            for p in self.ps:
                for M in self.masses:
                    assert_passed(self, kernel_routes_report(ell, p, M, 0.7, atol=1e-9))

    def test_sign_laws(self):
        for p in self.ps:
            for M in self.masses:
                off = [s_off_auto(ell, p, M).value for ell in range(8)]
                reg = [s_reg_auto(ell, p, 1.0).value for ell in range(8)]
                for ell in (0, 2, 4):
                    self.assertLessEqual(off[ell], off[ell + 2] + 1e-12)
                    self.assertLessEqual(off[ell + 2], 1e-12)
                for ell in (1, 3, 5):
                    self.assertGreaterEqual(off[ell], off[ell + 2] - 1e-12)
                    self.assertGreaterEqual(off[ell + 2], -1e-12)
                for ell in range(6):
                    self.assertGreaterEqual(reg[ell], reg[ell + 2] - 1e-12)
                    self.assertGreaterEqual(reg[ell + 2], -1e-12)

    def test_even_in_p(self):
        for ell in range(5):
            self.assertEqual(s_off_auto(ell, 1.5, 1.0).value, s_off_auto(ell, -1.5, 1.0).value)
            self.assertEqual(s_reg_auto(ell, 1.5, 1.0).value, s_reg_auto(ell, -1.5, 1.0).value)

    def test_off_decay(self):
        for ell in self.ells:
            self.assertLess(abs(s_off_auto(ell, 20.0, 10.0).value), 1e-10)

    def test_reg_decays_like_inverse_p(self):
        gamma = 0.8
        for ell in self.ells:
            for p in (5.0, 20.0, 50.0):
                self.assertLessEqual(s_reg_closed(ell, p, gamma).value, 2.0 * gamma / p)
            self.assertAlmostEqual(1.0, 300.0 * s_reg_closed(ell, 300.0, gamma).value / (2.0 * gamma), delta=1e-3)

    def test_reg_bound(self):
        # (N−1)/2·√(η/μ)·S_reg ≤ (π/2)γ(N−1)(M+1)/√(M(M+2)) reduces to S_reg ≤ πγ
        for ell in self.ells:
            for p in self.ps:
                self.assertLessEqual(s_reg_closed(ell, p, 0.4).value, math.pi * 0.4 + 1e-15)

    def test_large_p_uses_quadrature(self):
        result = s_off_auto(2, 2.0 * CLOSED_FORM_MAX_P, 1.0)
        self.assertIs(KernelMethod.quadrature, result.method)
        self.assertTrue(math.isfinite(result.value))
        self.assertLess(abs(result.value), 1e-100)
        result = s_reg_auto(2, 2.0 * CLOSED_FORM_MAX_P, 1.0)
        self.assertAlmostEqual(1.0, result.value * CLOSED_FORM_MAX_P, delta=1e-4)

    def test_closed_form_domain(self):
        with self.assertRaises(ParameterError):
            s_off_closed(1, 0.0, 1.0)
        with self.assertRaises(ParameterError):
            s_reg_closed(2, CLOSED_FORM_MAX_P + 1.0, 1.0)
        with self.assertRaises(ParameterError):
            s_reg(0, 1.0, 0.0)
        with self.assertRaises(ParameterError):
            s_off(0, 1.0, -1.0)

    def test_reg_profile_limit(self):
        self.assertAlmostEqual(reg_profile(4, 1e-9), reg_profile(4, 0.0), places=12)


class RatioTestCase(unittest.TestCase):

    def test_ratios_do_not_overflow(self):
        self.assertAlmostEqual(1.0, float(cosh_ratio(1e4, math.pi / 2.0)), places=15)
        self.assertEqual(0.0, float(cosh_ratio(1e4, 0.0)))
        self.assertAlmostEqual(1.0, float(sinh_ratio(1e4, math.pi / 2.0)), places=15)

    def test_ratios_match_definition(self):
        for p in (0.3, 2.0, 7.0):
            for u in (0.0, 0.4, 1.2):
                self.assertAlmostEqual(math.cosh(p * u) / math.cosh(math.pi * p / 2.0), float(cosh_ratio(p, u)),
                                       places=14)
                self.assertAlmostEqual(math.sinh(p * u) / math.sinh(math.pi * p / 2.0), float(sinh_ratio(p, u)),
                                       places=14)
        self.assertAlmostEqual(2.0 * 0.4 / math.pi, float(sinh_ratio(0.0, 0.4)), places=15)


class IdentityTestCase(unittest.TestCase):

    def test_legendre_cosh_identity(self):
        for ell in (0, 2, 4):
            for p in (0.5, 1.0, 3.0):
                assert_passed(self, legendre_cosh_identity_check(ell, p))

    def test_identity_at_zero(self):
        report = legendre_cosh_identity_check(2, 0.0)
        assert_passed(self, report)
        self.assertAlmostEqual(math.pi / 4.0, report.rhs, places=14)


class QuadCheckedTestCase(unittest.TestCase):

    def test_failure_raises(self):
        spec = QuadratureSpec(max_subdiv=1)
        with self.assertRaises(QuadratureError) as ctx:
            quad_checked(lambda x: math.sin(200.0 * x), 0.0, 10.0, spec, 'oscillatory')
        self.assertIsNotNone(ctx.exception.abs_error)

    def test_success(self):
        value, err = quad_checked(math.exp, 0.0, 1.0, QuadratureSpec(), 'exp')
        self.assertAlmostEqual(math.e - 1.0, value, places=13)
        self.assertGreaterEqual(err, 0.0)


if __name__ == '__main__':
    unittest.main()
