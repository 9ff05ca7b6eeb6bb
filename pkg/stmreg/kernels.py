"""
Diagonalized partial-wave kernels S_off;ℓ(p) and S_reg;ℓ(p).

Both kernels are computed by adaptive quadrature of their defining
integrals and, for even ℓ, from the closed hypergeometric form. The two
routes are independent and are cross-checked by :func:`kernel_routes_report`.

The defining integrals are taken after the substitution y = (M+1)·sin u
(off) and y = sin u (reg), which removes the square-root weight and
leaves a smooth integrand on a bounded interval. All hyperbolic ratios
are evaluated as decaying exponentials so nothing overflows for large p.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy import integrate

from .models import (
    StmRegException, ParameterError, BoundReport,
    DerivedMasses, QuadratureSpec, DEFAULT_QUAD
)
from .specfun import ZERO_P, HyperParams, hyp2f1_conj_series, legendre_p


logger = logging.getLogger(__name__)

CLOSED_FORM_MAX_P = 400.0
"""Above this |p| the closed forms are not evaluated; use the quadrature route."""


class QuadratureError(StmRegException):
    def __init__(self, msg, **kwargs):
        self.abs_error = kwargs.get('abs_error')
        super().__init__(msg, **kwargs)


class KernelMethod(Enum):
    quadrature = 'quadrature'
    closed_form = 'closed_form'


@dataclass(frozen=True)
class KernelEval:
    value: float
    abs_error: float
    """Estimated quadrature or series truncation error, never negative."""
    method: KernelMethod


def cosh_ratio(p: float, u):
    """cosh(pu)/cosh(πp/2) for p ≥ 0 and 0 ≤ u ≤ π/2."""
    return np.exp(p * (u - math.pi / 2.0)) * (1.0 + np.exp(-2.0 * p * u)) / (1.0 + math.exp(-math.pi * p))


def sinh_ratio(p: float, u):
    """sinh(pu)/sinh(πp/2) for p ≥ 0 and 0 ≤ u ≤ π/2, with the limit 2u/π at p = 0."""
    if p < ZERO_P:
        return 2.0 * np.asarray(u) / math.pi
    return np.exp(p * (u - math.pi / 2.0)) * -np.expm1(-2.0 * p * u) / -math.expm1(-math.pi * p)


def quad_checked(func: Callable[[float], float], lo: float, hi: float,
                 quad: QuadratureSpec, label: str, **kwargs):
    """
    :func:`scipy.integrate.quad` with the tolerances of ``quad``, raising
    :class:`QuadratureError` instead of warning when QUADPACK gives up.
    """
    result = integrate.quad(func, lo, hi, epsabs=quad.atol, epsrel=quad.rtol,
                            limit=quad.max_subdiv, full_output=1, **kwargs)
    value, abs_error = result[0], result[1]
    if len(result) > 3:
        tolerated = max(quad.atol, quad.rtol * abs(value))
        if not abs_error <= 1e3 * tolerated:
            raise QuadratureError(f'{label}: {result[3].strip()} (error estimate {abs_error:.3g})',
                                  abs_error=abs_error)
        logger.debug('%s: QUADPACK warning tolerated, error estimate %.3g', label, abs_error)
    return value, abs_error


def _ratio_for(ell: int):
    return cosh_ratio if ell % 2 == 0 else sinh_ratio


def _check_ell(ell: int):
    if int(ell) != ell or ell < 0:
        raise ParameterError(f'ell must be a non-negative integer, got {ell}')


def s_off(ell: int, p: float, M: float, quad: QuadratureSpec = DEFAULT_QUAD) -> KernelEval:
    """
    S_off;ℓ(p) by quadrature. Even ℓ carries a leading minus sign and the
    cosh ratio, odd ℓ the sinh ratio:

        S_off;ℓ(p) = ∓2(M+1) ∫_0^{arcsin(1/(M+1))} P_ℓ((M+1) sin u) R_ℓ(p, u) du
    """
    _check_ell(ell)
    DerivedMasses.from_mass(M)
    p = abs(p)
    scale = M + 1.0
    u_max = math.asin(1.0 / scale)
    ratio = _ratio_for(ell)

    def integrand(u):
        y = min(1.0, scale * math.sin(u))
        return legendre_p(ell, y) * ratio(p, u)

    value, err = quad_checked(integrand, 0.0, u_max, quad, f'S_off;{ell}({p})')
    sign = -1.0 if ell % 2 == 0 else 1.0
    return KernelEval(sign * 2.0 * scale * value, 2.0 * scale * err, KernelMethod.quadrature)


def s_reg(ell: int, p: float, gamma: float, quad: QuadratureSpec = DEFAULT_QUAD) -> KernelEval:
    """
    S_reg;ℓ(p) = 2γ ∫_0^{π/2} P_ℓ(sin u) R_ℓ(p, u) du by quadrature.
    """
    _check_ell(ell)
    if not gamma > 0:
        raise ParameterError(f'gamma must be positive, got {gamma}')
    p = abs(p)
    ratio = _ratio_for(ell)

    def integrand(u):
        return legendre_p(ell, min(1.0, math.sin(u))) * ratio(p, u)

    value, err = quad_checked(integrand, 0.0, math.pi / 2.0, quad, f'S_reg;{ell}({p})')
    return KernelEval(2.0 * gamma * value, 2.0 * gamma * err, KernelMethod.quadrature)


def _odd_product(ell: int, p: float) -> float:
    result = 1.0
    for k in range(1, ell // 2 + 1):
        result *= p * p + (2 * k - 1) ** 2
    return result


def _check_closed(ell: int, p: float):
    _check_ell(ell)
    if ell % 2:
        raise ParameterError(f'closed forms exist for even ell only, got {ell}')
    if abs(p) > CLOSED_FORM_MAX_P:
        raise ParameterError(f'closed forms are evaluated for |p| <= {CLOSED_FORM_MAX_P}, got {p}')


def s_off_closed(ell: int, p: float, M: float) -> KernelEval:
    """
    S_off;ℓ(p) for even ℓ from the closed form

        −[2^{ℓ+1} ℓ! x^ℓ/(2ℓ+1)!] ∏ₖ₌₁^{ℓ/2}[p²+(2k−1)²] ₂F₁(...; x²)/cosh(πp/2)

    with x = 1/(M+1).
    """
    _check_closed(ell, p)
    DerivedMasses.from_mass(M)
    p = abs(p)
    x = 1.0 / (M + 1.0)
    series = hyp2f1_conj_series(HyperParams(ell, p, x))
    coef = 2.0 ** (ell + 1) * math.factorial(ell) * x ** ell / math.factorial(2 * ell + 1)
    scale = coef * _odd_product(ell, p) * float(cosh_ratio(p, 0.0))
    return KernelEval(-scale * series.value, scale * series.abs_error, KernelMethod.closed_form)


def reg_profile(ell: int, p: float) -> float:
    """
    (tanh(πp/2)/p)·∏ₖ₌₁^{ℓ/2}(p²+(2k−1)²)/(p²+4k²) for even ℓ, with the
    limit (π/2)·∏(2k−1)²/(2k)² at p = 0. S_reg;ℓ = 2γ times this.
    """
    p = abs(p)
    if p < ZERO_P:
        lead = math.pi / 2.0
    else:
        lead = math.tanh(math.pi * p / 2.0) / p
    for k in range(1, ell // 2 + 1):
        lead *= (p * p + (2 * k - 1) ** 2) / (p * p + 4 * k * k)
    return lead


def s_reg_closed(ell: int, p: float, gamma: float) -> KernelEval:
    """S_reg;ℓ(p) = γ(2tanh(πp/2)/p)∏ₖ₌₁^{ℓ/2}(p²+(2k−1)²)/(p²+4k²), even ℓ."""
    _check_closed(ell, p)
    if not gamma > 0:
        raise ParameterError(f'gamma must be positive, got {gamma}')
    # a finite product, no series to truncate
    return KernelEval(2.0 * gamma * reg_profile(ell, p), 0.0, KernelMethod.closed_form)


def s_off_one_at_zero(M: float) -> float:
    """S_off;1(0) = (4(M+1)/π)[1 − √(M(M+2))·arcsin(1/(M+1))]."""
    DerivedMasses.from_mass(M)
    return 4.0 * (M + 1.0) / math.pi * (1.0 - math.sqrt(M * (M + 2.0)) * math.asin(1.0 / (M + 1.0)))


def arcsine_moment(ell: int) -> float:
    """∫_{−1}^{1} P_ℓ(y)/√(1−y²) dy = π ℓ!²/(2^{2ℓ}(ℓ/2)!⁴) for even ℓ, 0 for odd ℓ."""
    _check_ell(ell)
    if ell % 2:
        return 0.0
    half = math.factorial(ell // 2)
    return math.pi * math.factorial(ell) ** 2 / (4.0 ** ell * half ** 4)


def s_off_auto(ell: int, p: float, M: float, quad: QuadratureSpec = DEFAULT_QUAD) -> KernelEval:
    """Closed route for even ℓ within its range, quadrature otherwise."""
    if ell % 2 == 0 and abs(p) <= CLOSED_FORM_MAX_P:
        return s_off_closed(ell, p, M)
    return s_off(ell, p, M, quad)


def s_reg_auto(ell: int, p: float, gamma: float, quad: QuadratureSpec = DEFAULT_QUAD) -> KernelEval:
    if ell % 2 == 0 and abs(p) <= CLOSED_FORM_MAX_P:
        return s_reg_closed(ell, p, gamma)
    return s_reg(ell, p, gamma, quad)


def kernel_routes_report(ell: int, p: float, M: float, gamma: float,
                         quad: QuadratureSpec = DEFAULT_QUAD, atol: float = 1e-9) -> BoundReport:
    """Both kernels by both routes; passes when each pair agrees within ``atol``."""
    off_q, off_c = s_off(ell, p, M, quad), s_off_closed(ell, p, M)
    reg_q, reg_c = s_reg(ell, p, gamma, quad), s_reg_closed(ell, p, gamma)
    context = {'ell': float(ell), 'p': p, 'M': M, 'gamma': gamma}
    return BoundReport.combine(f'kernel_routes[ell={ell},p={p:g},M={M:g}]', [
        BoundReport.equality('s_off', off_q.value, off_c.value, atol),
        BoundReport.equality('s_reg', reg_q.value, reg_c.value, atol),
    ], context)


def legendre_cosh_identity_check(ell: int, p: float, quad: QuadratureSpec = DEFAULT_QUAD,
                                 rtol: float = 1e-10) -> BoundReport:
    """
    ∫P_ℓ(y) cosh(p arcsin y)/√(1−y²) dy against
    (2 sinh(πp/2)/p)∏ₖ₌₁^{ℓ/2}(p²+(2k−1)²)/(p²+4k²), even ℓ.
    """
    _check_closed(ell, p)
    p = abs(p)

    def integrand(u):
        # cosh(pu), un-normalized: only used for moderate p
        return legendre_p(ell, min(1.0, math.sin(u))) * math.cosh(p * u)

    integral, _ = quad_checked(integrand, 0.0, math.pi / 2.0, quad, f'cosh identity ell={ell}')
    integral *= 2.0
    if p < ZERO_P:
        closed = arcsine_moment(ell)
    else:
        closed = 2.0 * math.sinh(math.pi * p / 2.0) / p
        for k in range(1, ell // 2 + 1):
            closed *= (p * p + (2 * k - 1) ** 2) / (p * p + 4 * k * k)
    return BoundReport.equality(f'legendre_cosh_identity[ell={ell},p={p:g}]', integral, closed,
                                rtol * abs(closed), context={'ell': float(ell), 'p': p})
