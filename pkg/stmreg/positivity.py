"""
Grid replay of the positivity argument for the partial-wave multipliers.

f(p) is the exact multiplier s√(μ/η) + ((N−1)/2)(S_off;ℓ + S_reg;ℓ)(p) and
h(p) a monotone minorant built from the reg kernel profile. Positivity of
the form on each even partial wave follows from h ≤ f, h(0) = f(0), a common
limit at infinity and monotonicity of h.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from serde import serialize, deserialize

from .models import ParameterError, PhysicalParams, BoundReport, DerivedMasses
from .kernels import s_off_auto, s_reg_auto, reg_profile
from .thresholds import gamma_ell_one, s_star_default, gamma_crit, check_supercritical


logger = logging.getLogger(__name__)

SCAN_TOL = 1e-12
ANCHOR_TOL = 1e-10
P_MIN = 1e-3


@serialize
@deserialize
@dataclass(frozen=True)
class PositivityCell:
    """Evidence for one partial wave."""
    ell: int
    min_f: float
    min_h: float
    min_f_minus_h: float
    anchor_gap: float
    """|f(0) − h(0)|."""
    h_monotone: bool


@serialize
@deserialize
@dataclass(frozen=True)
class PositivityScan:
    """
    ``passed`` holds exactly when ``min_h >= -tol`` and ``min_f_minus_h >= -tol``.
    """
    params: PhysicalParams
    ell_max: int
    p_grid: List[float]
    min_f: float
    min_h: float
    min_f_minus_h: float
    passed: bool
    s_star: float
    tol: float = SCAN_TOL
    cells: List[PositivityCell] = field(default_factory=list)


def _check_s(s: float):
    # the optimized s* sits on 0 once γ ≥ γ⁰_{M,1}
    if not 0.0 <= s < 1.0:
        raise ParameterError(f's must lie in [0, 1), got {s}')


def f_func(ell: int, s: float, p: float, N: int, M: float, gamma: float) -> float:
    """
    f(p) = s√(M(M+2))/(M+1) + ((N−1)/2)(S_off;ℓ + S_reg;ℓ)(p). Even ℓ use the
    closed kernel forms, odd ℓ the quadrature route.
    """
    _check_s(s)
    masses = DerivedMasses.from_mass(M)
    off = s_off_auto(ell, p, M).value
    reg = s_reg_auto(ell, p, gamma).value
    return s * masses.ratio_sqrt + (N - 1) / 2.0 * (off + reg)


def f_tail_bound(p: float, N: int, M: float, gamma: float) -> float:
    """
    Upper bound on |f(p) − s√(μ/η)| for every ℓ:
    ((N−1)/2)(2γ/p + 4(M+1)a·e^{−p(π/2−a)}), a = arcsin(1/(M+1)).
    """
    a = math.asin(1.0 / (M + 1.0))
    p = abs(p)
    off = 4.0 * (M + 1.0) * a * math.exp(-p * (math.pi / 2.0 - a))
    reg = 2.0 * gamma / p if p > 0 else math.pi * gamma
    return (N - 1) / 2.0 * (off + reg)


def h_func(ell: int, s: float, p: float, N: int, M: float, gamma: float) -> float:
    """h(p) = s√(μ/η) + (N−1)(γ − γ^ℓ_{M,1})·(tanh(πp/2)/p)·∏(p²+(2k−1)²)/(p²+4k²)."""
    if int(ell) != ell or ell < 0 or ell % 2:
        raise ParameterError(f'h is defined for even ell only, got {ell}')
    _check_s(s)
    masses = DerivedMasses.from_mass(M)
    return s * masses.ratio_sqrt + (N - 1) * (gamma - gamma_ell_one(ell, M)) * reg_profile(ell, p)


def f_h_anchor_gap(ell: int, s: float, N: int, M: float, gamma: float) -> float:
    return abs(f_func(ell, s, 0.0, N, M, gamma) - h_func(ell, s, 0.0, N, M, gamma))


def default_p_grid(p_max: float = 40.0, n_points: int = 400) -> List[float]:
    """p = 0 followed by a log-spaced grid on [1e−3, p_max]."""
    if not p_max > P_MIN:
        raise ParameterError(f'p_max must exceed {P_MIN}, got {p_max}')
    if n_points < 2:
        raise ParameterError(f'n_points must be at least 2, got {n_points}')
    return [0.0] + list(np.logspace(math.log10(P_MIN), math.log10(p_max), n_points))


def verify_h_conditions(ell: int, s: float, N: int, M: float, gamma: float,
                        p_grid: List[float]) -> BoundReport:
    """
    Check on the grid: (a) h ≤ f, (b) h(0) = f(0), (c) f and h approach the
    common limit s√(μ/η) at the largest grid point within the proven tail
    bounds, (d) one-sided differences of h keep one sign.
    """
    grid = np.asarray(p_grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise ParameterError('p_grid must be a nonempty ascending grid of nonnegative reals')
    f = np.array([f_func(ell, s, p, N, M, gamma) for p in grid])
    h = np.array([h_func(ell, s, p, N, M, gamma) for p in grid])
    context = {'ell': float(ell), 's': s, 'N': float(N), 'M': M, 'gamma': gamma}

    gap = f - h
    worst = int(np.argmin(gap))
    cond_a = BoundReport.inequality('a_minorant', 0.0, float(gap[worst]), SCAN_TOL,
                                    detail=f'f-h={gap[worst]:.3g} at p={grid[worst]:g}')

    f0 = f_func(ell, s, 0.0, N, M, gamma)
    h0 = h_func(ell, s, 0.0, N, M, gamma)
    cond_b = BoundReport.equality('b_anchor', h0, f0, ANCHOR_TOL,
                                  detail=f'h(0)={h0:.15g}, f(0)={f0:.15g}')

    p_top = float(grid[-1])
    limit = s * DerivedMasses.from_mass(M).ratio_sqrt
    h_bound = (N - 1) * abs(gamma - gamma_ell_one(ell, M)) * (1.0 / p_top if p_top > 0 else math.pi / 2.0)
    cond_c = BoundReport.inequality(
        'c_tail', abs(f[-1] - limit) + abs(h[-1] - limit),
        f_tail_bound(p_top, N, M, gamma) + h_bound, SCAN_TOL,
        detail=f'at p={p_top:g}'
    )

    diffs = np.diff(h)
    significant = diffs[np.abs(diffs) > SCAN_TOL]
    rising = int(np.sum(significant > 0))
    falling = int(np.sum(significant < 0))
    flips = min(rising, falling)
    cond_d = BoundReport.inequality('d_monotone', float(flips), 0.0, 0.0,
                                    detail=f'{rising} rising and {falling} falling steps')

    report = BoundReport.combine(f'h_conditions[ell={ell}]', [cond_a, cond_b, cond_c, cond_d], context)
    if not report.passed:
        logger.warning('h conditions failed for ell=%d: %s', ell, report.detail)
    return report


def _scan_cell(ell: int, s: float, params: PhysicalParams, grid: np.ndarray) -> PositivityCell:
    # grid[0] is p = 0
    N, M, gamma = params.N, params.M, params.gamma
    f = np.array([f_func(ell, s, p, N, M, gamma) for p in grid])
    h = np.array([h_func(ell, s, p, N, M, gamma) for p in grid])
    diffs = np.diff(h)
    significant = diffs[np.abs(diffs) > SCAN_TOL]
    monotone = bool(np.all(significant > 0) or np.all(significant < 0))
    return PositivityCell(ell=ell, min_f=float(f.min()), min_h=float(h.min()),
                          min_f_minus_h=float((f - h).min()),
                          anchor_gap=float(abs(f[0] - h[0])),
                          h_monotone=monotone)


def scan_positivity(params: PhysicalParams, ell_max: int = 8, p_max: float = 40.0,
                    n_points: int = 400, s_star: Optional[float] = None,
                    workers: int = 1) -> PositivityScan:
    """
    Evaluate f and h for every even ℓ ≤ ``ell_max`` on p = 0 plus a log grid up
    to ``p_max``. Defaults to the optimized s*; an interior s* may be passed.
    Cells are independent and may run on ``workers`` threads.
    """
    check_supercritical(params.N, params.M, params.gamma)
    if int(ell_max) != ell_max or ell_max < 0 or ell_max % 2:
        raise ParameterError(f'ell_max must be an even non-negative integer, got {ell_max}')
    s = s_star_default(params.N, params.M, params.gamma) if s_star is None else s_star
    _check_s(s)
    grid = np.asarray(default_p_grid(p_max, n_points))
    ells = list(range(0, ell_max + 1, 2))
    logger.info('positivity scan N=%d M=%g gamma=%g (gamma_c=%.6g), s*=%.6g, ell<=%d',
                params.N, params.M, params.gamma, gamma_crit(params.N, params.M), s, ell_max)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        cells = list(pool.map(lambda ell: _scan_cell(ell, s, params, grid), ells))

    min_h = min(c.min_h for c in cells)
    min_gap = min(c.min_f_minus_h for c in cells)
    scan = PositivityScan(
        params=params, ell_max=ell_max, p_grid=[float(p) for p in grid],
        min_f=min(c.min_f for c in cells), min_h=min_h, min_f_minus_h=min_gap,
        passed=bool(min_h >= -SCAN_TOL and min_gap >= -SCAN_TOL),
        s_star=s, cells=cells
    )
    logger.info('positivity scan done: min f=%.3g, min h=%.3g, min f-h=%.3g, passed=%s',
                scan.min_f, scan.min_h, scan.min_f_minus_h, scan.passed)
    return scan
