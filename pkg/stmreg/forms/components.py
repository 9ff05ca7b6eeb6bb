"""
Partial-wave components of the three-body form Θ^ζ and the sandwich
Λ_γ·Θ_diag ≤ Θ ≤ Λ′_γ·Θ_diag.

Direct route: the angular integral ∫P_ℓ(y)/(A + By) dy is done in closed
form with Legendre Q, and the radial double integral is taken in the
variables p = e^t, q = e^{t+s}, where the measure p²q² dp dq / pq turns
into φ(t)φ(t+s) dt ds with φ(t) = e^{2t}ψ(e^t). The integrand is even in
s, so only s ≥ 0 is integrated; the reg kernel has a logarithmic
singularity at s = 0, which adaptive quadrature takes as an endpoint.

Diagonalized route: ((N−1)/2)∫|g_ψ(p)|²S(p)dp on the Mellin samples.
"""
import logging
import math
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy import integrate
from serde import serialize, deserialize

from ..models import ParameterError, PhysicalParams, BoundReport, DerivedMasses, QuadratureSpec, DEFAULT_QUAD
from ..kernels import QuadratureError, quad_checked, s_off_auto, s_reg_auto
from ..specfun import legendre_q
from ..thresholds import lambda_big, lambda_prime, lambda_prime_elementary, gamma_crit
from .charges import ChargeFamily, RadialCharge, combine_charges
from .mellin import MellinGrid, mellin_diagonalize


logger = logging.getLogger(__name__)

SANDWICH_RTOL = 1e-6
DIRECT_T_STEP = 0.05
WEIGHT_FLOOR = 1e-16


class FormComponent(Enum):
    off = 'off'
    reg = 'reg'


@dataclass(frozen=True)
class FormQuery:
    zeta: float = 1.0
    """Spectral parameter of Θ^ζ."""
    quad: QuadratureSpec = DEFAULT_QUAD
    t_step: float = DIRECT_T_STEP
    """Trapezoid spacing in t = ln k for the direct route."""

    def __post_init__(self):
        if not (self.zeta >= 0 and math.isfinite(self.zeta)):
            raise ParameterError(f'zeta must be a finite non-negative real, got {self.zeta}')
        if not self.t_step > 0:
            raise ParameterError(f't_step must be positive, got {self.t_step}')


@serialize
@deserialize
@dataclass(frozen=True)
class ThetaValue:
    diag: float
    off: float
    reg: float
    total: float
    components: Dict[str, float] = field(default_factory=dict)
    """F^ζ_ℓ per (ℓ, m), keyed ``'ell,m'``."""


def _log_nodes(psi: RadialCharge, t_step: float) -> Tuple[np.ndarray, np.ndarray, float]:
    lo, hi = psi.support()
    n = int(math.ceil((hi - lo) / t_step)) + 1
    t = np.linspace(lo, hi, n)
    return t, psi.log_profile(t), float(t[1] - t[0])


def f_diag(psi: RadialCharge, zeta: float, M: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """
    F^ζ_diag[ψ] = ∫k²√((μ/η)k² + ζ)|ψ(k)|²dk, integrated in t = ln k up to
    ``quad.k_cutoff``.
    """
    if not zeta >= 0:
        raise ParameterError(f'zeta must be non-negative, got {zeta}')
    ratio = DerivedMasses.from_mass(M).ratio_sqrt ** 2
    if psi.is_zero:
        return 0.0
    lo, hi = psi.support()
    t_cut = math.log(quad.k_cutoff)
    if hi > t_cut:
        peak = float(np.max(np.abs(psi.log_profile(np.linspace(lo, hi, 2001)))))
        edge = abs(float(psi.log_profile(t_cut)))
        if edge > 1e-8 * peak:
            raise QuadratureError(f'charge is not localized inside k_cutoff={quad.k_cutoff}',
                                  abs_error=edge)
        hi = t_cut

    def integrand(t):
        phi = float(psi.log_profile(t))
        return phi * phi * math.exp(-t) * math.sqrt(ratio * math.exp(2.0 * t) + zeta)

    value, _ = quad_checked(integrand, lo, hi, quad, 'F_diag')
    return value


def f_reg(ell: int, psi: RadialCharge, N: int, gamma: float, quad: QuadratureSpec = DEFAULT_QUAD,
          t_step: float = DIRECT_T_STEP) -> float:
    """
    F_reg;ℓ[ψ] = ((N−1)γ/π)∫∫φ(t)φ(t+s)Q_ℓ(cosh s) dt ds.
    """
    if not gamma > 0:
        raise ParameterError(f'gamma must be positive, got {gamma}')
    if psi.is_zero:
        return 0.0
    t, phi, dt = _log_nodes(psi, t_step)
    width = float(t[-1] - t[0])

    def lag_term(s):
        overlap = integrate.trapezoid(phi * psi.log_profile(t + s), dx=dt)
        half = math.sinh(0.5 * s)
        return overlap * legendre_q(ell, math.cosh(s), zm1=2.0 * half * half)

    value, _ = quad_checked(lag_term, 0.0, width, quad, f'F_reg;{ell}')
    return (N - 1) * gamma / math.pi * 2.0 * value


def f_off(ell: int, psi: RadialCharge, zeta: float, M: float, N: int,
          quad: QuadratureSpec = DEFAULT_QUAD, t_step: float = DIRECT_T_STEP) -> float:
    """
    F^ζ_off;ℓ[ψ] = −((N−1)/π)(−1)^ℓ(M+1)∫∫φ(t)φ(t+s)Q_ℓ(z) dt ds with
    z = (M+1)(cosh s + ζe^{−2t−s}/2).
    """
    if not zeta >= 0:
        raise ParameterError(f'zeta must be non-negative, got {zeta}')
    DerivedMasses.from_mass(M)
    if psi.is_zero:
        return 0.0
    t, phi, dt = _log_nodes(psi, t_step)
    width = float(t[-1] - t[0])
    scale = M + 1.0

    def lag_term(s):
        half = math.sinh(0.5 * s)
        shift = 0.5 * zeta * np.exp(-2.0 * t - s)
        zm1 = scale * (2.0 * half * half + shift) + M
        with np.errstate(over='ignore'):
            q = legendre_q(ell, zm1 + 1.0, zm1=zm1)
        return integrate.trapezoid(phi * psi.log_profile(t + s) * q, dx=dt)

    value, _ = quad_checked(lag_term, 0.0, width, quad, f'F_off;{ell}')
    sign = -1.0 if ell % 2 == 0 else 1.0
    return sign * (N - 1) / math.pi * scale * 2.0 * value


def f_component_diagonalized(ell: int, psi: RadialCharge, which: Union[FormComponent, str],
                             N: int, M: float, gamma: float, grid: MellinGrid = None,
                             quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """((N−1)/2)∫|g_ψ(p)|²S_ℓ(p)dp at ζ = 0, summed on the Mellin dual grid."""
    which = FormComponent(which)
    samples = mellin_diagonalize(psi, grid)
    if samples.norm_sq == 0:
        return 0.0
    weights = np.abs(samples.values) ** 2
    keep = weights > WEIGHT_FLOOR * weights.max()
    # the dual grid is symmetric, so each |p| is evaluated once
    p_abs, inverse = np.unique(np.abs(samples.p_grid[keep]), return_inverse=True)
    if which is FormComponent.off:
        kernel = np.array([s_off_auto(ell, p, M, quad).value for p in p_abs])
    else:
        kernel = np.array([s_reg_auto(ell, p, gamma, quad).value for p in p_abs])
    return (N - 1) / 2.0 * float(np.sum(weights[keep] * kernel[inverse]) * samples.dp)


def _grouped(charge_list: Sequence[RadialCharge]) -> List[RadialCharge]:
    groups: Dict[Tuple[int, int], List[RadialCharge]] = OrderedDict()
    for charge in charge_list:
        groups.setdefault(charge.key, []).append(charge)
    return [combine_charges(group) for group in groups.values()]


def theta_eval(charge_list: Sequence[RadialCharge], query: FormQuery, params: PhysicalParams) -> ThetaValue:
    """
    Θ^ζ = Σ_{ℓ,m} F^ζ_ℓ. Charges sharing (ℓ, m) are summed into one radial
    profile first; distinct (ℓ, m) do not interact.
    """
    if not charge_list:
        raise ParameterError('theta_eval needs at least one charge')
    diag = off = reg = 0.0
    components = {}
    for psi in _grouped(charge_list):
        d = f_diag(psi, query.zeta, params.M, query.quad)
        o = f_off(psi.ell, psi, query.zeta, params.M, params.N, query.quad, query.t_step)
        r = f_reg(psi.ell, psi, params.N, params.gamma, query.quad, query.t_step)
        components[f'{psi.ell},{psi.m}'] = d + o + r
        diag, off, reg = diag + d, off + o, reg + r
    return ThetaValue(diag=diag, off=off, reg=reg, total=diag + off + reg, components=components)


def check_bounds(charge_list: Sequence[RadialCharge], query: FormQuery, params: PhysicalParams,
                 lower: bool = True, rtol: float = SANDWICH_RTOL) -> BoundReport:
    """
    Λ_γ·Θ_diag ≤ Θ ≤ Λ′_γ·Θ_diag with slack ``rtol``·Θ_diag, plus the
    looser upper constant as a third sub-check. The lower check needs
    γ > γ_c and raises SubcriticalError otherwise; ``lower=False`` skips it.
    """
    N, M, gamma = params.N, params.M, params.gamma
    value = theta_eval(charge_list, query, params)
    eps = rtol * value.diag
    prime = lambda_prime(N, M, gamma)
    elementary = lambda_prime_elementary(N, M, gamma)
    context = {'zeta': query.zeta, 'diag': value.diag, 'off': value.off, 'reg': value.reg,
               'total': value.total, 'lambda_prime': prime, 'lambda_prime_elementary': elementary}
    context.update(params.echo())

    checks = []
    if lower:
        big = lambda_big(N, M, gamma)
        context['lambda_big'] = big
        context['gamma_c'] = gamma_crit(N, M)
        checks.append(BoundReport.inequality('lower', big * value.diag, value.total, eps))
    checks.append(BoundReport.inequality('upper', value.total, prime * value.diag, eps))
    checks.append(BoundReport.inequality('upper_elementary', value.total, elementary * value.diag, eps))
    report = BoundReport.combine('theta_sandwich', checks, context)
    if not report.passed:
        logger.warning('theta sandwich failed (%s): %s', report.detail, value)
    return report


def run_bound_suite(charge_sets: Sequence[Sequence[RadialCharge]], query: FormQuery,
                    params: PhysicalParams, workers: int = 1, seed: int = None) -> List[BoundReport]:
    """
    :func:`check_bounds` on every trial. Trials run on up to ``workers``
    threads; reports come back in trial order, tagged with the trial index
    and the seed that produced the trials, if given.
    """
    def run(indexed):
        index, charges = indexed
        report = check_bounds(charges, query, params)
        tags = {'trial': float(index)}
        if seed is not None:
            tags['seed'] = float(seed)
        return BoundReport(report.name, report.lhs, report.rhs, report.margin, report.tolerance,
                           report.passed, {**report.context, **tags}, report.detail)

    logger.info('bound suite: %d trials, N=%d M=%g gamma=%g zeta=%g, %d workers',
                len(charge_sets), params.N, params.M, params.gamma, query.zeta, workers)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        reports = list(pool.map(run, enumerate(charge_sets)))
    failed = sum(not r.passed for r in reports)
    logger.info('bound suite done: %d of %d trials passed', len(reports) - failed, len(reports))
    return reports


def hardy_rellich_check(width: float = 1.0, quad: QuadratureSpec = DEFAULT_QUAD) -> BoundReport:
    """
    For u(x) = exp(−|x|²/(2w²)) in ℝ³: ∫|u|²/|x| dx computed in position
    space, the same quantity from the reg form with (N−1)γ = 1, and the
    Hardy–Rellich bound (π/2)∫|k||û|²dk.
    """
    if not width > 0:
        raise ParameterError(f'width must be positive, got {width}')
    w2 = width * width
    position, _ = quad_checked(lambda r: 4.0 * math.pi * r * math.exp(-r * r / w2), 0.0, np.inf,
                               quad, 'hardy position side')
    # û(k) = w³e^{−w²k²/2}; the partial wave carries √(4π)
    psi = RadialCharge(ChargeFamily.gaussian, (math.sqrt(4.0 * math.pi) * width ** 3, 0.5 * w2), 0)
    identity = f_reg(0, psi, 2, 1.0, quad)
    momentum, _ = quad_checked(lambda k: k ** 3 * width ** 6 * math.exp(-w2 * k * k), 0.0, np.inf,
                               quad, 'hardy momentum side')
    bound = math.pi / 2.0 * 4.0 * math.pi * momentum
    context = {'width': width}
    return BoundReport.combine('hardy_rellich', [
        BoundReport.equality('fourier_identity', identity, position, SANDWICH_RTOL * position),
        BoundReport.inequality('inequality', position, bound, SANDWICH_RTOL * bound),
    ], context)
