import math
import unittest

import numpy as np

from stmreg.models import ParameterError
from stmreg.potential import (
    FitError, SeparableCharge, PotentialSample, contact_value, potential_on_ray, gamma_diag_apply,
    asymptotic_fit, yukawa_transform_check
)
from tests.helpers import assert_passed


RADII = list(np.logspace(-3.0, -1.0, 12))
UNIT = SeparableCharge(widths=(1.0, 1.0))


class YukawaTestCase(unittest.TestCase):

    def test_grid(self):
        for a in (0.0, 1.0, 3.0):
            for x in (0.5, 1.0, 2.0):
                assert_passed(self, yukawa_transform_check(a, x))

    def test_example(self):
        report = yukawa_transform_check(1.0, 1.0)
        self.assertAlmostEqual(7.2617, report.rhs, places=4)
        self.assertAlmostEqual(2.0 * math.pi ** 2 / math.e, report.lhs, delta=1e-6 * report.rhs)

    def test_domain(self):
        with self.assertRaises(ParameterError):
            yukawa_transform_check(-1.0, 1.0)
        with self.assertRaises(ParameterError):
            yukawa_transform_check(1.0, 0.0)


class SeparableChargeTestCase(unittest.TestCase):

    def test_contact_value(self):
        self.assertEqual(1.0, contact_value(UNIT))
        charge = SeparableCharge(widths=(2.0, 0.5), amplitude=3.0)
        self.assertAlmostEqual(3.0 * math.exp(-1.0 / 8.0) * math.exp(-0.5),
                               contact_value(charge, [0.0, 1.0, 0.0], [0.5, 0.0, 0.0]), places=14)

    def test_validation(self):
        with self.assertRaises(ParameterError):
            SeparableCharge(widths=(1.0,))
        with self.assertRaises(ParameterError):
            SeparableCharge(widths=(1.0, 1.0, 2.0))
        with self.assertRaises(ParameterError):
            SeparableCharge(widths=(1.0, -1.0))
        with self.assertRaises(ParameterError):
            contact_value(SeparableCharge(widths=(1.0, 1.0, 1.0)))
        with self.assertRaises(ParameterError):
            contact_value(UNIT, [0.0, 1.0])


class PotentialTestCase(unittest.TestCase):

    def test_singular_coefficient(self):
        for lam in (1.0, 5.0, 10.0):
            samples = potential_on_ray(UNIT, lam, 1.0, RADII)
            singular, _, report = asymptotic_fit(samples, contact_value(UNIT))
            assert_passed(self, report)
            self.assertAlmostEqual(1.0, singular, delta=0.01)

    def test_off_centre_configuration(self):
        charge = SeparableCharge(widths=(1.5, 0.8), amplitude=2.0)
        point, spectator = [0.3, -0.2, 0.5], [0.0, 0.6, 0.0]
        samples = potential_on_ray(charge, 2.0, 0.5, RADII, point, spectator)
        _, _, report = asymptotic_fit(samples, contact_value(charge, point, spectator))
        assert_passed(self, report)

    def test_constant_term_is_minus_gamma_diag(self):
        for lam in (1.0, 5.0, 10.0):
            for M in (0.5, 1.0, 10.0):
                samples = potential_on_ray(UNIT, lam, M, RADII)
                _, constant, _ = asymptotic_fit(samples, contact_value(UNIT))
                diag = gamma_diag_apply(UNIT, lam, M)
                self.assertAlmostEqual(-diag, constant, delta=0.02 * diag, msg=f'lambda={lam} M={M}')

    def test_monotone_in_lambda(self):
        values = [potential_on_ray(UNIT, lam, 1.0, [0.3])[0].value for lam in (0.5, 1.0, 5.0, 20.0)]
        self.assertTrue(all(b < a for a, b in zip(values, values[1:])))
        diags = [gamma_diag_apply(UNIT, lam, 1.0) for lam in (0.5, 1.0, 5.0, 20.0)]
        self.assertTrue(all(b > a for a, b in zip(diags, diags[1:])))

    def test_gamma_diag_linear_in_amplitude(self):
        scaled = SeparableCharge(widths=(1.0, 1.0), amplitude=-2.5)
        self.assertAlmostEqual(-2.5 * gamma_diag_apply(UNIT, 3.0, 1.0), gamma_diag_apply(scaled, 3.0, 1.0),
                               places=12)

    def test_smooth_and_decaying(self):
        r = list(np.linspace(0.01, 5.0, 200))
        values = np.array([s.value for s in potential_on_ray(UNIT, 1.0, 1.0, r, workers=4)])
        self.assertTrue(np.all(np.isfinite(values)))
        self.assertTrue(np.all(values > 0))
        self.assertTrue(np.all(np.diff(values) < 0))
        regular = values - 1.0 / np.asarray(r)
        second = np.diff(regular, 2)
        self.assertLess(np.max(np.abs(second)), 1e-2)
        far = potential_on_ray(UNIT, 1.0, 1.0, [40.0])[0].value
        self.assertLess(far, 1e-6)

    def test_samples(self):
        samples = potential_on_ray(UNIT, 2.0, 1.0, [0.1, 0.2])
        self.assertEqual([0.1, 0.2], [s.r for s in samples])
        self.assertTrue(all(s.lam == 2.0 for s in samples))

    def test_rejections(self):
        with self.assertRaises(ParameterError):
            potential_on_ray(UNIT, 1.0, 1.0, [0.1, 0.0])
        with self.assertRaises(ParameterError):
            potential_on_ray(UNIT, 0.0, 1.0, [0.1])
        with self.assertRaises(ParameterError):
            gamma_diag_apply(UNIT, 1.0, -1.0)


class FitTestCase(unittest.TestCase):

    def test_exact_recovery(self):
        samples = [PotentialSample(r=float(r), value=2.0 / r - 0.7 + 0.3 * r, lam=1.0) for r in RADII]
        singular, constant, report = asymptotic_fit(samples, 2.0)
        self.assertAlmostEqual(2.0, singular, places=9)
        self.assertAlmostEqual(-0.7, constant, places=7)
        assert_passed(self, report)
        self.assertAlmostEqual(-0.7, report.context['const_term'], places=7)

    def test_far_samples_ignored(self):
        samples = [PotentialSample(r=float(r), value=1.0 / r, lam=1.0) for r in RADII]
        samples.append(PotentialSample(r=3.0, value=100.0, lam=1.0))
        singular, _, _ = asymptotic_fit(samples, 1.0)
        self.assertAlmostEqual(1.0, singular, places=9)

    def test_too_few_samples(self):
        samples = [PotentialSample(r=r, value=1.0 / r, lam=1.0) for r in (0.001, 0.01, 0.1, 0.5)]
        with self.assertRaises(FitError):
            asymptotic_fit(samples, 1.0)

    def test_narrow_span(self):
        samples = [PotentialSample(r=r, value=1.0 / r, lam=1.0) for r in (0.05, 0.06, 0.07, 0.08, 0.09)]
        with self.assertRaises(FitError):
            asymptotic_fit(samples, 1.0)

    def test_wrong_contact_fails(self):
        samples = [PotentialSample(r=float(r), value=1.0 / r, lam=1.0) for r in RADII]
        _, _, report = asymptotic_fit(samples, 1.5)
        self.assertFalse(report.passed)


if __name__ == '__main__':
    unittest.main()
