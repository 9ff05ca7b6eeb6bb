"""
Critical couplings, stability constants and the scalar factors that
sandwich the full energy form.

Everything is closed-form except the Legendre-weighted integrals inside
:func:`gamma_ell` and :func:`gamma_bar`.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

from serde import serialize, deserialize

from .models import (
    ParameterError, SubcriticalError, PhysicalParams, DerivedMasses, QuadratureSpec, DEFAULT_QUAD, BoundReport
)
from .kernels import quad_checked, arcsine_moment, s_off_one_at_zero
from .specfun import HyperParams, hyp2f1_conj, legendre_p


logger = logging.getLogger(__name__)

THREE_BOSON_GAMMA_C = 4.0 / 3.0 - math.sqrt(3.0) / math.pi
"""Critical value quoted for three identical bosons, about 0.782."""


@serialize
@deserialize
@dataclass(frozen=True)
class ThresholdSet:
    N: int
    M: float
    gamma: float
    gamma_c: float
    lambda_big: float
    lambda_prime: float
    lambda_zero: float
    s_star_lo: float
    s_star_hi: float = 1.0


def _check_n_m(N: int, M: float):
    if int(N) != N or N < 2:
        raise ParameterError(f'boson count must be an integer >= 2, got N={N}')
    if not (M > 0 and math.isfinite(M)):
        raise ParameterError(f'impurity mass must be positive and finite, got M={M}')


def _check_even(ell: int):
    if int(ell) != ell or ell < 0 or ell % 2:
        raise ParameterError(f'only even non-negative ell are admissible here, got {ell}')


def _coupling_scale(N: int, M: float) -> float:
    """(N−1)(M+1)/√(M(M+2)), the factor converting couplings into form units."""
    return (N - 1) * (M + 1.0) / math.sqrt(M * (M + 2.0))


def gamma_zero_one(M: float) -> float:
    """γ⁰_{M,1} = γ̄⁰_M = (2(M+1)/π)·arcsin(1/(M+1))."""
    return 2.0 * (M + 1.0) / math.pi * math.asin(1.0 / (M + 1.0))


def gamma_crit(N: int, M: float) -> float:
    """γ_c = (2(M+1)/π)arcsin(1/(M+1)) − 2√(M(M+2))/(π(N−1)(M+1))."""
    _check_n_m(N, M)
    return gamma_zero_one(M) - 2.0 * math.sqrt(M * (M + 2.0)) / (math.pi * (N - 1) * (M + 1.0))


def gamma_crit_limit_small_mass(N: int) -> float:
    """sup over M of γ_c, reached as M → 0."""
    _check_n_m(N, 1.0)
    return 1.0


def gamma_crit_limit_large_mass(N: int) -> float:
    """inf over M of γ_c, reached as M → ∞."""
    _check_n_m(N, 1.0)
    return 2.0 / math.pi * (N - 2) / (N - 1)


def _mass_weighted_integral(ell: int, M: float, quad: QuadratureSpec) -> float:
    """∫_{−1}^{1} P_ℓ(y)/√(1−y²x²) dy for even ℓ, x = 1/(M+1), via y = sin(u)/x."""
    x = 1.0 / (M + 1.0)

    def integrand(u):
        return legendre_p(ell, min(1.0, math.sin(u) / x))

    value, _ = quad_checked(integrand, 0.0, math.asin(x), quad, f'mass-weighted moment ell={ell}')
    return 2.0 * value / x


def gamma_ell_two(ell: int, N: int, M: float) -> float:
    """γ^ℓ_{M,2} = 2^{2ℓ+1}(ℓ/2)!⁴√(M(M+2))/(π ℓ!²(N−1)(M+1))."""
    _check_even(ell)
    _check_n_m(N, M)
    masses = DerivedMasses.from_mass(M)
    return 2.0 / (N - 1) * masses.ratio_sqrt / arcsine_moment(ell)


def gamma_ell(ell: int, N: int, M: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """
    γ^ℓ_M: the ratio of the mass-weighted to the arcsine-weighted Legendre
    moment, minus the (2/(N−1))√(μ/η) correction in the same units.
    Odd ℓ are rejected, the positivity argument never needs them.
    """
    _check_even(ell)
    _check_n_m(N, M)
    return _mass_weighted_integral(ell, M, quad) / arcsine_moment(ell) - gamma_ell_two(ell, N, M)


def gamma_ell_one(ell: int, M: float) -> float:
    """
    γ^ℓ_{M,1} = 2^{2ℓ+1} ℓ! (ℓ/2)!² /(π(2ℓ+1)!(M+1)^ℓ) · ₂F₁((ℓ+1)/2,(ℓ+1)/2; ℓ+3/2; 1/(M+1)²).
    """
    _check_even(ell)
    _check_n_m(2, M)
    x = 1.0 / (M + 1.0)
    coef = (2.0 ** (2 * ell + 1) * math.factorial(ell) * math.factorial(ell // 2) ** 2
            / (math.pi * math.factorial(2 * ell + 1)) * x ** ell)
    return coef * hyp2f1_conj(HyperParams(ell, 0.0, x))


def gamma_bar(ell: int, M: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """
    γ̄^ℓ_M = 2^{ℓ+1}(ℓ/2)!²/(π ℓ!(M+1)^ℓ) · ∫_0^1 u^ℓ/√(1−u²x²) du, a majorant
    of γ^ℓ_{M,1} that decreases in ℓ.
    """
    _check_even(ell)
    _check_n_m(2, M)
    x = 1.0 / (M + 1.0)
    integral, _ = quad_checked(lambda v: (math.sin(v) / x) ** ell, 0.0, math.asin(x), quad,
                               f'gamma_bar ell={ell}')
    integral /= x
    coef = 2.0 ** (ell + 1) * math.factorial(ell // 2) ** 2 / (math.pi * math.factorial(ell)) * x ** ell
    return coef * integral


def check_supercritical(N: int, M: float, gamma: float) -> float:
    gamma_c = gamma_crit(N, M)
    if not gamma > gamma_c:
        raise SubcriticalError(f'gamma={gamma} does not exceed gamma_c={gamma_c:.12g} '
                               f'for N={N}, M={M}')
    return gamma_c


def lambda_big(N: int, M: float, gamma: float) -> float:
    """Λ_γ = min{1, (π(N−1)/2)·((M+1)/√(M(M+2)))·(γ−γ_c)}."""
    gamma_c = check_supercritical(N, M, gamma)
    return min(1.0, math.pi / 2.0 * _coupling_scale(N, M) * (gamma - gamma_c))


def lambda_prime(N: int, M: float, gamma: float) -> float:
    """Λ′_γ = 1 + ((N−1)(M+1)/√(M(M+2)))·max{πγ/2, S_off;1(0)/2 + 2γ/π}."""
    _check_n_m(N, M)
    if not gamma > 0:
        raise ParameterError(f'gamma must be positive, got {gamma}')
    branch = max(math.pi * gamma / 2.0, 0.5 * s_off_one_at_zero(M) + 2.0 * gamma / math.pi)
    return 1.0 + _coupling_scale(N, M) * branch


def lambda_prime_elementary(N: int, M: float, gamma: float) -> float:
    """The cruder continuity constant 1 + ((N−1)(M+1)/√(M(M+2)))((M+1)/M + πγ/2)."""
    _check_n_m(N, M)
    if not gamma > 0:
        raise ParameterError(f'gamma must be positive, got {gamma}')
    return 1.0 + _coupling_scale(N, M) * ((M + 1.0) / M + math.pi * gamma / 2.0)


def lambda_zero(params: PhysicalParams) -> float:
    """
    λ₀, the spectral shift beyond which the lower sandwich factor is positive:
    (N−1)²γ²/(μΛ²b²) for α ≥ 0 and ((N−1)γ + |α|b)²/(μΛ²b²) for α < 0.
    """
    big = lambda_big(params.N, params.M, params.gamma)
    mu = params.masses.mu
    numerator = (params.N - 1) * params.gamma
    if params.alpha < 0:
        numerator += abs(params.alpha) * params.b
    return numerator ** 2 / (mu * big ** 2 * params.b ** 2)


def s_star_interval(ell: int, N: int, M: float, gamma: float) -> Tuple[float, float]:
    """
    Admissible s* interval, identical for every ℓ:
    lo = max{0, (π/2)((N−1)(M+1)/√(M(M+2)))(γ⁰_{M,1}−γ)}, hi = 1.
    """
    if int(ell) != ell or ell < 0:
        raise ParameterError(f'ell must be a non-negative integer, got {ell}')
    check_supercritical(N, M, gamma)
    lo = max(0.0, math.pi / 2.0 * _coupling_scale(N, M) * (gamma_zero_one(M) - gamma))
    return lo, 1.0


def s_star_default(N: int, M: float, gamma: float) -> float:
    """The optimized s*, the left end of the interval; 1 − s* = Λ_γ."""
    return s_star_interval(0, N, M, gamma)[0]


def phi_bound_factors(params: PhysicalParams) -> Tuple[float, float]:
    """
    Scalar factors of the energy-form sandwich:
    lower = Λ_γ − max{(N−1)γ, (N−1)γ−αb}/(b√(λμ)),
    upper = Λ′_γ + max{(N−1)γ, (N−1)γ+αb}/(b√(λμ)).
    """
    N, gamma, alpha, b = params.N, params.gamma, params.alpha, params.b
    big = lambda_big(N, params.M, gamma)
    prime = lambda_prime(N, params.M, gamma)
    denom = b * math.sqrt(params.lam * params.masses.mu)
    lower = big - max((N - 1) * gamma, (N - 1) * gamma - alpha * b) / denom
    upper = prime + max((N - 1) * gamma, (N - 1) * gamma + alpha * b) / denom
    return lower, upper


def compute_threshold_set(params: PhysicalParams) -> ThresholdSet:
    N, M, gamma = params.N, params.M, params.gamma
    lo, hi = s_star_interval(0, N, M, gamma)
    result = ThresholdSet(
        N=N, M=M, gamma=gamma,
        gamma_c=gamma_crit(N, M),
        lambda_big=lambda_big(N, M, gamma),
        lambda_prime=lambda_prime(N, M, gamma),
        lambda_zero=lambda_zero(params),
        s_star_lo=lo, s_star_hi=hi
    )
    logger.debug('thresholds for N=%d M=%g gamma=%g: %s', N, M, gamma, result)
    return result


def gamma_crit_report(N: int, M: float, ell_max: int = 12, tol: float = 1e-8,
                      quad: QuadratureSpec = DEFAULT_QUAD) -> BoundReport:
    """γ_c against the maximum of γ^ℓ_M over even ℓ ≤ ``ell_max``, attained at ℓ = 0."""
    values = [gamma_ell(ell, N, M, quad) for ell in range(0, ell_max + 1, 2)]
    best = max(values)
    return BoundReport.equality(f'gamma_crit[N={N},M={M:g}]', best, gamma_crit(N, M), tol,
                                context={'N': float(N), 'M': M, 'argmax_ell': float(2 * values.index(best))})
