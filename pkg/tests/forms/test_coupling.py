import math
import unittest

import numpy as np

from stmreg.models import ParameterError, PhysicalParams
from stmreg.forms import ProfileKind, RegularizerProfile, alpha_tilde, alpha_tilde_range, running_coupling


INDICATOR = RegularizerProfile(ProfileKind.indicator, 1.0)
EXPONENTIAL = RegularizerProfile(ProfileKind.exponential, 1.0)


class AlphaTildeTestCase(unittest.TestCase):

    def setUp(self):
        self.params = PhysicalParams(N=3, M=1.0, gamma=0.8, alpha=0.25, b=1.0)

    def test_indicator(self):
        self.assertEqual(0.25, alpha_tilde(0.5, self.params, INDICATOR))
        self.assertAlmostEqual(0.25 - 2.0 * 0.8, alpha_tilde(1.0, self.params, INDICATOR), places=15)
        self.assertAlmostEqual(0.25 - 2.0 * 0.8 / 4.0, alpha_tilde(4.0, self.params, INDICATOR), places=15)

    def test_exponential(self):
        expected = 0.25 + 2.0 * 0.8 * math.expm1(-0.5) / 0.5
        self.assertAlmostEqual(expected, alpha_tilde(0.5, self.params, EXPONENTIAL), places=14)
        self.assertAlmostEqual(0.25 - 1.6, alpha_tilde(1e-8, self.params, EXPONENTIAL), places=6)
        self.assertAlmostEqual(0.25, alpha_tilde(1e8, self.params, EXPONENTIAL), places=6)

    def test_range(self):
        lo, hi = alpha_tilde_range(self.params, INDICATOR)
        self.assertAlmostEqual(0.25 - 1.6, lo, places=15)
        self.assertEqual(0.25, hi)
        for profile in (INDICATOR, EXPONENTIAL):
            lo, hi = alpha_tilde_range(self.params, profile)
            for r in np.logspace(-4.0, 4.0, 81):
                value = alpha_tilde(float(r), self.params, profile)
                self.assertTrue(lo - 1e-12 <= value <= hi + 1e-12, f'{profile.kind.value} r={r}: {value}')

    def test_envelope(self):
        for profile in (INDICATOR, EXPONENTIAL, RegularizerProfile(ProfileKind.exponential, 0.3)):
            for r in np.linspace(0.0, 5.0, 51):
                self.assertTrue(profile.within_envelope(float(r)))

    def test_domain(self):
        with self.assertRaises(ParameterError):
            alpha_tilde(0.0, self.params, INDICATOR)
        with self.assertRaises(ParameterError):
            alpha_tilde(1.0, self.params, RegularizerProfile(ProfileKind.indicator, 2.0))
        with self.assertRaises(ParameterError):
            RegularizerProfile(b=0.0)
        with self.assertRaises(ParameterError):
            INDICATOR.theta(-1.0)


class RunningCouplingTestCase(unittest.TestCase):

    def test_two_bosons(self):
        params = PhysicalParams(N=2, M=1.0, gamma=0.5, alpha=-0.1)
        positions = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.5, 0.0]]
        self.assertAlmostEqual(-0.1 + 0.5 * 1.0 / 0.5, running_coupling(positions, 1, params, INDICATOR), places=15)
        self.assertAlmostEqual(-0.1, running_coupling(positions, 2, params, INDICATOR), places=15)
        self.assertAlmostEqual(-0.1 + 0.5 * math.exp(-0.5) / 0.5,
                               running_coupling(positions, 1, params, EXPONENTIAL), places=14)

    def test_three_bosons(self):
        params = PhysicalParams(N=3, M=1.0, gamma=0.5)
        positions = np.array([[1.0, 1.0, 1.0], [1.5, 1.0, 1.0], [1.0, 1.0, 3.0], [1.0, 0.2, 1.0]])
        expected = 0.5 * (math.exp(-0.5) / 0.5 + math.exp(-0.8) / 0.8)
        self.assertAlmostEqual(expected, running_coupling(positions, 2, params, EXPONENTIAL), places=14)

    def test_permutation_symmetry(self):
        params = PhysicalParams(N=3, M=1.0, gamma=0.7, alpha=0.3)
        rng = np.random.default_rng(11)
        positions = rng.normal(size=(4, 3))
        swapped = positions[[0, 3, 2, 1]]
        for profile in (INDICATOR, EXPONENTIAL):
            self.assertAlmostEqual(running_coupling(positions, 1, params, profile),
                                   running_coupling(swapped, 3, params, profile), places=14)
            self.assertAlmostEqual(running_coupling(positions, 2, params, profile),
                                   running_coupling(swapped, 2, params, profile), places=14)

    def test_own_position_may_coincide(self):
        params = PhysicalParams(N=2, M=1.0, gamma=0.5)
        positions = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]
        self.assertEqual(0.0, running_coupling(positions, 1, params, INDICATOR))

    def test_rejections(self):
        params = PhysicalParams(N=2, M=1.0, gamma=0.5)
        positions = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
        with self.assertRaises(ParameterError):
            running_coupling(positions, 1, params, INDICATOR)
        with self.assertRaises(ParameterError):
            running_coupling(positions[:2], 1, params, INDICATOR)
        with self.assertRaises(ParameterError):
            running_coupling(positions, 0, params, INDICATOR)


if __name__ == '__main__':
    unittest.main()
