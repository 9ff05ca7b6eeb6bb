"""
Closed-form oracles and small assertions shared by the test modules.
"""
import math
from unittest import TestCase

from stmreg.models import BoundReport, DerivedMasses
from stmreg.forms import ChargeFamily, RadialCharge


def gaussian_charge(c: float = 1.0, a: float = 1.0, ell: int = 0, m: int = 0) -> RadialCharge:
    """ψ(k) = c·exp(−a k²) as the (ℓ, m) component."""
    return RadialCharge(ChargeFamily.gaussian, (c, a), ell, m)


def log_gaussian_charge(c: float = 1.0, mean: float = 0.0, width: float = 1.0 / math.sqrt(2.0),
                        ell: int = 0) -> RadialCharge:
    """e^{2t}ψ(e^t) = c·exp(−(t − mean)²/(2 width²)); the defaults give e^{−t²}."""
    return RadialCharge(ChargeFamily.log_gaussian, (c, mean, width), ell)


def f_diag_gaussian(a: float, M: float) -> float:
    """F⁰_diag of exp(−a k²): √(μ/η)∫k³e^{−2ak²}dk = √(μ/η)/(8a²)."""
    return DerivedMasses.from_mass(M).ratio_sqrt / (8.0 * a * a)


def mellin_of_unit_log_gaussian(p):
    """g_ψ for e^{2t}ψ(e^t) = e^{−t²}."""
    return math.exp(-p * p / 4.0) / math.sqrt(2.0)


def assert_passed(case: TestCase, report: BoundReport):
    case.assertTrue(report.passed, f'{report.name} failed: margin={report.margin:.3g}, '
                                   f'tolerance={report.tolerance:.3g}, {report.detail}')
