"""
Special functions the closed-form partial-wave kernels rest on.

Everything here is a pure function of its arguments. The Gauss hypergeometric
function is only provided for real parameters and for the conjugate-pair
family ₂F₁((s+ip)/2, (s−ip)/2; c; z), whose series has purely real terms.
"""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy import special

from .models import ParameterError, StmRegException, BoundReport


logger = logging.getLogger(__name__)

ArrayOrFloat = Union[float, np.ndarray]

ZERO_P = 1e-13
"""Below this magnitude the diagonalization variable p is treated as zero."""

SERIES_RTOL = 1e-14
SERIES_MAX_TERMS = 100_000

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# above this z the conjugate-pair series switches to the expansion around z = 1
_CONNECTION_Z = 0.9
# ... unless the two connection terms cancel by more than e^10
_CONNECTION_MAX_EXPONENT = 10.0


class SeriesConvergenceError(StmRegException):
    pass


class SeriesResult(NamedTuple):
    value: float
    abs_error: float
    terms: int


@dataclass(frozen=True)
class HyperParams:
    """
    Parameter triple selecting ₂F₁((ℓ+1+ip)/2, (ℓ+1−ip)/2; ℓ+3/2; x²).
    """
    ell: int
    """Partial-wave order, even."""
    p: float
    """Diagonalization variable."""
    x: float
    """Mass argument 1/(M+1), or 1."""

    def __post_init__(self):
        _check_order(self.ell)
        if self.ell % 2:
            raise ParameterError(f'the conjugate-pair family needs even ell, got {self.ell}')
        if not math.isfinite(self.p):
            raise ParameterError(f'p must be finite, got {self.p}')
        if not 0.0 <= self.x <= 1.0:
            raise ParameterError(f'x must lie in [0, 1], got {self.x}')


def _check_order(ell: int):
    if int(ell) != ell or ell < 0:
        raise ParameterError(f'order must be a non-negative integer, got {ell}')


def gamma(z: float) -> float:
    """
    Real Γ(z) by the Lanczos approximation, with the reflection formula
    below z = 1/2. Relative accuracy is about 1e-15.
    """
    if z <= 0 and z == math.floor(z):
        raise ParameterError(f'Γ has a pole at {z}')
    if z < 0.5:
        return math.pi / (math.sin(math.pi * z) * gamma(1.0 - z))
    z -= 1.0
    x = _LANCZOS_COEF[0]
    for i, coef in enumerate(_LANCZOS_COEF[1:], start=1):
        x += coef / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power so t**(z+1/2) does not overflow before Γ does
    half = t ** ((z + 0.5) / 2.0)
    return _SQRT_2PI * half * (half * math.exp(-t)) * x


def rgamma(z: float) -> float:
    """1/Γ(z), zero at the poles."""
    if z <= 0 and z == math.floor(z):
        return 0.0
    return 1.0 / gamma(z)


def legendre_p(ell: int, y: ArrayOrFloat) -> ArrayOrFloat:
    """
    P_ℓ(y) by Bonnet's recurrence (n+1)P_{n+1} = (2n+1)yP_n − nP_{n−1}.
    Accepts scalars or arrays with every entry in [−1, 1].
    """
    _check_order(ell)
    arr = np.asarray(y, dtype=float)
    if np.any(np.isnan(arr)) or np.any(np.abs(arr) > 1.0):
        raise ParameterError('legendre_p is defined on [-1, 1] only')
    p_prev = np.ones_like(arr)
    if ell == 0:
        result = p_prev
    else:
        p_cur = arr.copy()
        for n in range(1, ell):
            p_prev, p_cur = p_cur, ((2 * n + 1) * arr * p_cur - n * p_prev) / (n + 1)
        result = p_cur
    if np.ndim(y) == 0:
        return float(result)
    return result


def legendre_rodrigues(ell: int, y: ArrayOrFloat) -> ArrayOrFloat:
    """
    P_ℓ(y) from the Rodrigues form (1/(2^ℓ ℓ!)) d^ℓ/dy^ℓ (y²−1)^ℓ.
    Only meant as an oracle for small ℓ: the coefficients grow quickly.
    """
    _check_order(ell)
    poly = Polynomial([-1.0, 0.0, 1.0]) ** ell
    poly = poly.deriv(ell) / (2.0 ** ell * math.factorial(ell))
    return poly(y)


def legendre_q(ell: int, z: ArrayOrFloat, zm1: ArrayOrFloat = None) -> ArrayOrFloat:
    """
    Legendre function of the second kind Q_ℓ(z) for z > 1, so that
    ∫_{−1}^{1} P_ℓ(y)/(z−y) dy = 2Q_ℓ(z).

    :param zm1: z − 1 computed without cancellation, if the caller has it.
                Only used below z = 1.5, where Q_0 is taken as ½ log(1 + 2/(z−1)).
    """
    _check_order(ell)
    z_arr = np.asarray(z, dtype=float)
    zm1_arr = z_arr - 1.0 if zm1 is None else np.asarray(zm1, dtype=float)
    z_arr, zm1_arr = np.broadcast_arrays(z_arr, zm1_arr)
    if np.any(~(zm1_arr > 0)):
        raise ParameterError('legendre_q is evaluated for z > 1 only')
    out = np.empty(z_arr.shape, dtype=float)

    near = z_arr < 1.5
    if np.any(near):
        zn = z_arr[near]
        q_prev = 0.5 * np.log1p(2.0 / zm1_arr[near])
        if ell == 0:
            out[near] = q_prev
        else:
            # forward recurrence, mild error growth for z < 1.5 and small ell
            q_cur = zn * q_prev - 1.0
            for n in range(1, ell):
                q_prev, q_cur = q_cur, ((2 * n + 1) * zn * q_cur - n * q_prev) / (n + 1)
            out[near] = q_cur
    far = ~near
    if np.any(far):
        zf = z_arr[far]
        coef = math.sqrt(math.pi) * math.factorial(ell) * rgamma(ell + 1.5)
        out[far] = coef / (2.0 * zf) ** (ell + 1) * special.hyp2f1(
            (ell + 1) / 2.0, (ell + 2) / 2.0, ell + 1.5, 1.0 / (zf * zf))

    if np.ndim(z) == 0 and (zm1 is None or np.ndim(zm1) == 0):
        return float(out)
    return out


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n = a(a+1)···(a+n−1), with (a)_0 = 1."""
    if int(n) != n or n < 0:
        raise ParameterError(f'n must be a non-negative integer, got {n}')
    result = 1.0
    for k in range(int(n)):
        result *= a + k
    return result


def double_factorial(n: int) -> int:
    if int(n) != n or n < 0:
        raise ParameterError(f'n must be a non-negative integer, got {n}')
    n = int(n)
    if n % 2 == 0:
        return 2 ** (n // 2) * math.factorial(n // 2)
    half = (n + 1) // 2
    return math.factorial(n + 1) // (2 ** half * math.factorial(half))


def _x_over_sinh(x: float) -> float:
    if x < ZERO_P:
        return 1.0
    return 2.0 * x * math.exp(-x) / -math.expm1(-2.0 * x)


def gamma_abs_sq(n: int, b: float) -> float:
    """|Γ(n+1+ib)|² = (πb/sinh πb)·∏ₖ₌₁ⁿ(k²+b²)."""
    if int(n) != n or n < 0:
        raise ParameterError(f'n must be a non-negative integer, got {n}')
    b = abs(b)
    result = _x_over_sinh(math.pi * b)
    for k in range(1, int(n) + 1):
        result *= k * k + b * b
    return result


def gamma_half_abs_sq(n: int, b: float) -> float:
    """|Γ(n+½+ib)|² = (π/cosh πb)·∏ₖ₌₁ⁿ((k−½)²+b²)."""
    if int(n) != n or n < 0:
        raise ParameterError(f'n must be a non-negative integer, got {n}')
    b = abs(b)
    x = math.pi * b
    result = 2.0 * math.pi * math.exp(-x) / (1.0 + math.exp(-2.0 * x))
    for k in range(1, int(n) + 1):
        result *= (k - 0.5) ** 2 + b * b
    return result


def _sum_series(ratio_of, z: float, rtol: float, max_terms: int, label: str) -> SeriesResult:
    total = 1.0
    term = 1.0
    ratio = 0.0
    k = 0
    while True:
        ratio = ratio_of(k) * z
        term *= ratio
        k += 1
        total += term
        if abs(ratio) < 1.0 and abs(term) <= rtol * abs(total):
            break
        if k >= max_terms:
            raise SeriesConvergenceError(
                f'{label} did not converge within {max_terms} terms (z={z})')
    if abs(ratio) < 1.0:
        tail = abs(term) * abs(ratio) / (1.0 - abs(ratio))
    else:
        tail = abs(term)
    return SeriesResult(total, tail + 2.0 * np.finfo(float).eps * abs(total), k)


def hyp2f1_real_series(a: float, b: float, c: float, z: float,
                       rtol: float = SERIES_RTOL,
                       max_terms: int = SERIES_MAX_TERMS) -> SeriesResult:
    """₂F₁(a, b; c; z) for real parameters and 0 ≤ z < 1 by direct summation."""
    if c <= 0 and c == math.floor(c):
        raise ParameterError(f'c must not be a non-positive integer, got {c}')
    if not 0.0 <= z < 1.0:
        raise ParameterError(f'the series is summed for 0 <= z < 1 only, got {z}')
    return _sum_series(lambda k: (a + k) * (b + k) / ((c + k) * (k + 1)),
                       z, rtol, max_terms, '2F1 series')


def conj_pair_series(s: float, p: float, c: float, z: float,
                     rtol: float = SERIES_RTOL,
                     max_terms: int = SERIES_MAX_TERMS) -> SeriesResult:
    """
    ₂F₁((s+ip)/2, (s−ip)/2; c; z) for 0 ≤ z < 1. Since
    (a+k)(b+k) = ((s+2k)² + p²)/4 every term is real.
    """
    if not c > 0:
        raise ParameterError(f'c must be positive, got {c}')
    if not 0.0 <= z < 1.0:
        raise ParameterError(f'the series is summed for 0 <= z < 1 only, got {z}')
    p2 = p * p
    return _sum_series(lambda k: ((s + 2 * k) ** 2 + p2) / 4.0 / ((c + k) * (k + 1)),
                       z, rtol, max_terms, 'conjugate-pair 2F1 series')


def _hyp2f1_conj_at_one(ell: int, p: float) -> float:
    # Gauss summation: Γ(ℓ+3/2)Γ(½)/|Γ((ℓ+2+ip)/2)|² with Γ(ℓ+3/2) = √π (½)_{ℓ+1}
    return math.pi * pochhammer(0.5, ell + 1) / gamma_abs_sq(ell // 2, p / 2.0)


def _hyp2f1_conj_connection(ell: int, p: float, z: float, rtol: float,
                            max_terms: int) -> SeriesResult:
    """Linear connection formula to 1 − z; both series have real terms again."""
    w = 1.0 - z
    half_rising = pochhammer(0.5, ell + 1)
    a_coef = math.pi * half_rising / gamma_abs_sq(ell // 2, p / 2.0)
    b_coef = -2.0 * math.pi * half_rising / gamma_half_abs_sq(ell // 2, p / 2.0)
    first = conj_pair_series(ell + 1, p, 0.5, w, rtol, max_terms)
    second = conj_pair_series(ell + 2, p, 1.5, w, rtol, max_terms)
    left = a_coef * first.value
    right = b_coef * math.sqrt(w) * second.value
    value = left + right
    err = (abs(a_coef) * first.abs_error + abs(b_coef) * math.sqrt(w) * second.abs_error
           + 4.0 * np.finfo(float).eps * (abs(left) + abs(right)))
    return SeriesResult(value, err, first.terms + second.terms)


def hyp2f1_conj_series(params: HyperParams, rtol: float = SERIES_RTOL,
                       max_terms: int = SERIES_MAX_TERMS) -> SeriesResult:
    """
    ₂F₁((ℓ+1+ip)/2, (ℓ+1−ip)/2; ℓ+3/2; x²) with a truncation error estimate.

    The sign of p is dropped up front, so the value is even in p bit for bit.
    """
    ell, p, x = params.ell, abs(params.p), params.x
    z = x * x
    if x == 1.0:
        value = _hyp2f1_conj_at_one(ell, p)
        return SeriesResult(value, 4.0 * np.finfo(float).eps * value, 0)
    if z > _CONNECTION_Z and p * (math.pi / 2.0 - math.asin(x)) < _CONNECTION_MAX_EXPONENT:
        return _hyp2f1_conj_connection(ell, p, z, rtol, max_terms)
    return conj_pair_series(ell + 1, p, ell + 1.5, z, rtol, max_terms)


def hyp2f1_conj(params: HyperParams, rtol: float = SERIES_RTOL,
                max_terms: int = SERIES_MAX_TERMS) -> float:
    return hyp2f1_conj_series(params, rtol, max_terms).value


def gauss_summation_check(a: float, b: float, c: float, rtol: float = 1e-6) -> BoundReport:
    """
    Compare the series side of ₂F₁(a, b; c; z) extrapolated to z → 1⁻ with
    Gauss' Γ-ratio Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b)).

    The series is summed at z = 1 − 2^{−j}, j = 5..12, and fitted by the
    known local expansion: powers of w = 1 − z plus w^σ-powers, σ = c−a−b,
    with logarithmic companions when σ is an integer.
    """
    sigma = c - a - b
    if not sigma > 0:
        raise ParameterError(f'Gauss summation needs c-a-b > 0, got {sigma}')
    if c <= 0 and c == math.floor(c):
        raise ParameterError(f'c must not be a non-positive integer, got {c}')

    ws = 2.0 ** -np.arange(5, 13, dtype=float)
    values = np.array([hyp2f1_real_series(a, b, c, 1.0 - w, max_terms=500_000).value
                       for w in ws])
    columns = [np.ones_like(ws), ws, ws ** 2, ws ** 3]
    if abs(sigma - round(sigma)) < 1e-12:
        columns += [ws ** (sigma + j) * np.log(ws) for j in range(3)]
    else:
        columns += [ws ** (sigma + j) for j in range(3)]
    design = np.column_stack(columns)
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    series_side = float(coef[0])

    ratio_side = gamma(c) * gamma(sigma) * rgamma(c - a) * rgamma(c - b)
    logger.debug('Gauss summation (%g, %g, %g): series %.15g, ratio %.15g',
                 a, b, c, series_side, ratio_side)
    return BoundReport.equality(
        'gauss_summation', series_side, ratio_side,
        rtol * max(1.0, abs(ratio_side)),
        context={'a': a, 'b': b, 'c': c}
    )
