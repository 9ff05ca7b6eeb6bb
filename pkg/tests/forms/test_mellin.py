import unittest

import numpy as np

from stmreg.models import ParameterError
from stmreg.forms import ChargeFamily, RadialCharge, GridCoverageError, MellinGrid, mellin_diagonalize, f_diag
from tests.helpers import log_gaussian_charge, mellin_of_unit_log_gaussian
import tests.examples.charges as cexamples


class MellinTestCase(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        cls.unit = mellin_diagonalize(log_gaussian_charge())

    def test_log_gaussian_closed_form(self):
        p = self.unit.p_grid
        window = np.abs(p) <= 12.0
        expected = np.array([mellin_of_unit_log_gaussian(x) for x in p[window]])
        np.testing.assert_allclose(expected, self.unit.values[window].real, atol=1e-12)
        np.testing.assert_allclose(0.0, self.unit.values[window].imag, atol=1e-12)

    def test_shifted_log_gaussian_picks_up_a_phase(self):
        shifted = mellin_diagonalize(log_gaussian_charge(mean=1.5))
        window = np.abs(shifted.p_grid) <= 8.0
        moduli = np.abs(shifted.values[window])
        expected = np.array([mellin_of_unit_log_gaussian(x) for x in shifted.p_grid[window]])
        np.testing.assert_allclose(expected, moduli, atol=1e-12)

    def test_dual_grid(self):
        p = self.unit.p_grid
        self.assertTrue(np.all(np.diff(p) > 0))
        self.assertAlmostEqual(self.unit.dp, float(p[-1] - p[-2]), places=12)
        self.assertEqual(self.unit.values.shape, p.shape)

    def test_plancherel(self):
        M = 1.0
        for charge in (cexamples.gaussian_s, cexamples.poly_d, cexamples.log_p):
            samples = mellin_diagonalize(charge)
            ratio = np.sqrt(M * (M + 2.0)) / (M + 1.0)
            self.assertAlmostEqual(f_diag(charge, 0.0, M), ratio * samples.norm_sq,
                                   delta=1e-6 * samples.norm_sq)

    def test_linear_in_charge(self):
        double = RadialCharge(ChargeFamily.gaussian, (2.0, 1.0), 0)
        single = mellin_diagonalize(cexamples.gaussian_s)
        self.assertAlmostEqual(4.0 * single.norm_sq, mellin_diagonalize(double).norm_sq, places=12)

    def test_zero_charge(self):
        zero = RadialCharge(ChargeFamily.gaussian, (0.0, 1.0), 0)
        samples = mellin_diagonalize(zero)
        self.assertEqual(0.0, samples.norm_sq)
        self.assertFalse(np.any(samples.values))

    def test_narrow_span_rejected(self):
        with self.assertRaises(GridCoverageError):
            mellin_diagonalize(log_gaussian_charge(), MellinGrid(span=(-1.0, 1.0)))

    def test_explicit_span(self):
        samples = mellin_diagonalize(log_gaussian_charge(), MellinGrid(span=(-8.0, 8.0)))
        self.assertAlmostEqual(self.unit.norm_sq, samples.norm_sq, places=10)

    def test_grid_validation(self):
        with self.assertRaises(ParameterError):
            MellinGrid(n_points=8)
        with self.assertRaises(ParameterError):
            MellinGrid(pad=1.0)
        with self.assertRaises(ParameterError):
            MellinGrid(span=(1.0, -1.0))


if __name__ == '__main__':
    unittest.main()
