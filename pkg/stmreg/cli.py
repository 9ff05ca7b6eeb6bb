"""
Command-line front end: threshold tables, kernel route checks, positivity
scans, the form-sandwich suite and the potential checks.

Every command except ``thresholds`` emits BoundReport rows. The exit status
is 0 when every check passed, 1 when any failed and 2 for usage,
configuration and subcritical-coupling errors.
"""
import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

import numpy as np

from .config import Config, Command, OutputFormat, RunConfig, create_config, load_run_config
from .models import StmRegException, BoundReport, PhysicalParams
from .kernels import kernel_routes_report, legendre_cosh_identity_check
from .thresholds import ThresholdSet, compute_threshold_set, gamma_crit_report
from .positivity import scan_positivity, verify_h_conditions
from .forms import FormQuery, random_charges, run_bound_suite, hardy_rellich_check
from .potential import (
    SeparableCharge, asymptotic_fit, contact_value, gamma_diag_apply, potential_on_ray,
    yukawa_transform_check
)
from .tables import emit_table, render_summary


logger = logging.getLogger(__name__)

THRESHOLD_COLUMNS = ['N', 'M', 'gamma', 'gamma_c', 'lambda_big', 'lambda_prime', 'lambda_zero', 's_star_lo']
KERNEL_P_POINTS = (0.0, 0.5, 2.0, 10.0)
IDENTITY_P_POINTS = (0.0, 1.0, 3.0)
BOUND_SUITE_SIZE = 20
BOUND_SUITE_ELL_MAX = 4
YUKAWA_A = (0.0, 1.0, 3.0)
YUKAWA_X = (0.5, 1.0, 2.0)
RAY_RADII = tuple(np.logspace(-3.0, -1.0, 12))
CONST_TERM_RTOL = 0.02


def _list_of(cast: Callable):
    def parse(text: str):
        try:
            return [cast(item) for item in text.split(',') if item.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f'expected a comma-separated list, got {text!r}')
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--N', type=_list_of(int), default=None, help='boson count(s), comma separated')
    common.add_argument('--M', type=_list_of(float), default=None, help='impurity mass(es), comma separated')
    common.add_argument('--gamma', type=_list_of(float), default=None,
                        help='three-body coupling(s); default gamma_c + 0.05 per cell')
    common.add_argument('--alpha', type=float, default=None)
    common.add_argument('--b', type=float, default=None)
    common.add_argument('--lambda', dest='lam', type=float, default=None)
    common.add_argument('--ell-max', dest='ell_max', type=int, default=None)
    common.add_argument('--p-max', dest='p_max', type=float, default=None)
    common.add_argument('--grid', type=int, default=None, help='number of log-spaced p points')
    common.add_argument('--seed', type=int, default=None)
    common.add_argument('--out', default=None, help='output file; stdout when absent')
    common.add_argument('--format', choices=[f.value for f in OutputFormat], default=None)
    common.add_argument('--config', default=None, help='flat KEY=value file with STM_REG_* keys')

    parser = argparse.ArgumentParser(prog='stmreg', description=__doc__.strip().splitlines()[0])
    parser.add_argument('--version', action='version', version=f'%(prog)s {Config.VERSION}')
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('thresholds', parents=[common], help='gamma_c, stability constants and s* per sweep cell')
    sub.add_parser('kernels', parents=[common], help='closed form against quadrature for both kernels')
    sub.add_parser('positivity', parents=[common], help='f/h positivity scan over even partial waves')
    sub.add_parser('bounds', parents=[common], help='randomized form-sandwich suite and Hardy-Rellich check')
    sub.add_parser('potential', parents=[common], help='Yukawa identity and near-plane expansion at N=2')
    sub.add_parser('verify-all', parents=[common], help='every suite above')
    return parser


def _cells(run: RunConfig) -> List[PhysicalParams]:
    return [run.params_for(N, M, gamma) for N, M, gamma in run.grids.cells()]


def _pooled(run: RunConfig, func, items) -> list:
    """Map over sweep cells; results stay in sweep order."""
    with ThreadPoolExecutor(max_workers=run.threads) as pool:
        return list(pool.map(func, items))


def threshold_rows(run: RunConfig) -> List[ThresholdSet]:
    return _pooled(run, compute_threshold_set, _cells(run))


def kernel_reports(run: RunConfig) -> List[BoundReport]:
    reports = []
    for params in _cells(run):
        for ell in range(0, run.ell_max + 1, 2):
            for p in KERNEL_P_POINTS:
                if p <= run.p_max:
                    reports.append(kernel_routes_report(ell, p, params.M, params.gamma))
    for ell in range(0, run.ell_max + 1, 2):
        for p in IDENTITY_P_POINTS:
            reports.append(legendre_cosh_identity_check(ell, p))
    return reports


def positivity_reports(run: RunConfig) -> List[BoundReport]:
    reports = []
    for params in _cells(run):
        scan = scan_positivity(params, run.ell_max, run.p_max, run.grid, workers=run.threads)
        context = params.echo()
        context.update({'s_star': scan.s_star, 'min_f': scan.min_f, 'min_h': scan.min_h})
        reports.append(BoundReport.inequality(
            f'positivity[N={params.N},M={params.M:g},gamma={params.gamma:g}]',
            0.0, min(scan.min_h, scan.min_f_minus_h), scan.tol, context,
            detail=f'min h={scan.min_h:.3g}, min f-h={scan.min_f_minus_h:.3g}'
        ))
        for ell in range(0, run.ell_max + 1, 2):
            reports.append(verify_h_conditions(ell, scan.s_star, params.N, params.M, params.gamma, scan.p_grid))
    return reports


def bound_reports(run: RunConfig) -> List[BoundReport]:
    reports = []
    query = FormQuery(zeta=1.0)
    trials = random_charges(run.seed, BOUND_SUITE_SIZE, min(run.ell_max, BOUND_SUITE_ELL_MAX))
    for params in _cells(run):
        reports.extend(run_bound_suite(trials, query, params, workers=run.threads, seed=run.seed))
    reports.append(hardy_rellich_check())
    return reports


def potential_reports(run: RunConfig) -> List[BoundReport]:
    """Yukawa grid, then per mass of the sweep the near-plane fit at N = 2."""
    reports = [yukawa_transform_check(a, x) for a in YUKAWA_A for x in YUKAWA_X]
    charge = SeparableCharge(widths=(1.0, 1.0))
    contact = contact_value(charge)
    lam = run.params.lam
    for M in sorted(set(run.grids.M)):
        samples = potential_on_ray(charge, lam, M, RAY_RADII, workers=run.threads)
        _, constant, report = asymptotic_fit(samples, contact)
        reports.append(report)
        diag = gamma_diag_apply(charge, lam, M)
        reports.append(BoundReport.equality(f'const_term[M={M:g},lambda={lam:g}]', constant, -diag,
                                            CONST_TERM_RTOL * abs(diag), context={'M': M, 'lambda': lam}))
    return reports


REPORTERS = {
    Command.kernels: [kernel_reports],
    Command.positivity: [positivity_reports],
    Command.bounds: [bound_reports],
    Command.potential: [potential_reports],
    Command.verify_all: [
        lambda run: [gamma_crit_report(p.N, p.M) for p in _cells(run)],
        kernel_reports, positivity_reports, bound_reports, potential_reports
    ],
}


def execute(run: RunConfig) -> int:
    """
    Run one command and write its table.

    :return: the exit status
    """
    if run.command is Command.thresholds:
        rows = threshold_rows(run)
        text = emit_table(rows, run.format, run.out, THRESHOLD_COLUMNS, Config.VERSION)
        if run.out is None:
            sys.stdout.write(text)
        return 0

    reports: List[BoundReport] = []
    for reporter in REPORTERS[run.command]:
        reports.extend(reporter(run))
    text = emit_table(reports, run.format, run.out, version=Config.VERSION)
    if run.out is None:
        sys.stdout.write(text)
    sys.stderr.write(render_summary(run.command.value, reports, Config.VERSION))
    failed = [r.name for r in reports if not r.passed]
    if failed:
        logger.warning('%d of %d checks failed: %s', len(failed), len(reports), ', '.join(failed))
        return 1
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    overrides = {key: getattr(args, key) for key in
                 ('N', 'M', 'gamma', 'alpha', 'b', 'lam', 'ell_max', 'p_max', 'grid', 'seed', 'out', 'format')}
    try:
        config = create_config()
        run = load_run_config(args.command, overrides, args.config, config.THREADS)
        logger.info('stmreg %s: %s over %d cell(s)', Config.VERSION, run.command.value, len(run.grids.cells()))
        return execute(run)
    except StmRegException as e:
        logger.error('%s: %s', type(e).__name__, e)
        sys.stderr.write(f'stmreg: error: {e}\n')
        return e.exit_code
