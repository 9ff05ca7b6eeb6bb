import itertools
import os
from contextlib import contextmanager
from dataclasses import dataclass, replace
from enum import Enum
from importlib.metadata import Distribution, PackageNotFoundError
from logging.config import dictConfig
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple

from dotenv import dotenv_values
from environs import Env, EnvError

from .models import StmRegException, ParameterError, PhysicalParams
from .thresholds import gamma_crit


def _version() -> str:
    try:
        return Distribution.from_name(__package__).version
    except PackageNotFoundError:
        return 'unknown'


DEFAULT_GAMMA_OFFSET = 0.05
"""Offset above γ_c used when no coupling is given."""

LOG_FORMAT = '[%(asctime)s] [%(levelname)s][%(module)s:%(lineno)d %(process)d %(thread)d] %(message)s'


class ConfigError(StmRegException):
    def __init__(self, msg, **kwargs):
        kwargs.setdefault('exit_code', 2)
        super().__init__(msg, **kwargs)


class Config:
    """
    Base configuration
    """
    DEBUG = False
    VERSION = _version()

    def __init__(self):
        # Environment variables
        env = Env()
        env.read_env()  # also read .env file, if it exists

        try:
            self.THREADS = env.int('STM_REG_THREADS', os.cpu_count() or 1)
            self.LOG_FILE = env('STM_REG_LOG_FILE', '/tmp/stmreg.log')
        except EnvError as e:
            raise ConfigError(str(e))
        if self.THREADS < 1:
            raise ConfigError(f'STM_REG_THREADS must be at least 1, got {self.THREADS}')

        self.env = env

    def logging_config(self, package_level: str, package_handlers: List[str]) -> Dict[str, Any]:
        return {
            'version': 1,
            'disable_existing_loggers': False,
            'formatters': {
                'simple': {
                    'format': LOG_FORMAT
                },
            },
            'handlers': {
                'console_simple': {
                    'level': 'INFO',
                    'class': 'logging.StreamHandler',
                    'formatter': 'simple',
                },
                'file': {
                    'level': 'DEBUG',
                    'class': 'logging.FileHandler',
                    'filename': self.LOG_FILE,
                    'formatter': 'simple',
                    'delay': True
                }
            },
            'loggers': {
                '': {  # root logger
                    'level': 'WARNING',
                    'handlers': ['console_simple'],
                },
                'stmreg': {  # package logger
                    'level': package_level,
                    'handlers': package_handlers,
                    'propagate': False
                    # required to avoid double logging with root logger
                },
            }
        }


class DevConfig(Config):
    """
    Development configuration
    """
    ENV = 'development'
    DEBUG = True

    def __init__(self):
        super().__init__()
        dictConfig(self.logging_config('DEBUG', ['console_simple', 'file']))


class ProdConfig(Config):
    """
    Production configuration
    """
    ENV = 'production'

    def __init__(self):
        super().__init__()
        dictConfig(self.logging_config('INFO', ['console_simple']))


def create_config() -> Config:
    if os.environ.get('APPLICATION_MODE', 'production') == 'dev':
        return DevConfig()
    return ProdConfig()


class Command(Enum):
    thresholds = 'thresholds'
    kernels = 'kernels'
    positivity = 'positivity'
    bounds = 'bounds'
    potential = 'potential'
    verify_all = 'verify-all'


class OutputFormat(Enum):
    csv = 'csv'
    json = 'json'


@dataclass(frozen=True)
class SweepSpec:
    N: Tuple[int, ...] = (2,)
    M: Tuple[float, ...] = (1.0,)
    gamma: Tuple[float, ...] = ()
    """Empty means γ_c(N, M) + 0.05 for each cell."""

    def __post_init__(self):
        if not self.N or not self.M:
            raise ConfigError('sweep ranges for N and M must be nonempty')

    def cells(self) -> List[Tuple[int, float, Optional[float]]]:
        """Sweep cells in output order: N outermost, then M, then γ."""
        gammas = self.gamma or (None,)
        return list(itertools.product(self.N, self.M, gammas))


@dataclass(frozen=True)
class RunConfig:
    command: Command
    params: PhysicalParams
    """The first sweep cell, with the scalar parameters."""
    grids: SweepSpec
    ell_max: int = 8
    p_max: float = 40.0
    grid: int = 400
    seed: int = 7
    out: Optional[Path] = None
    format: OutputFormat = OutputFormat.csv
    threads: int = 1

    def params_for(self, N: int, M: float, gamma: Optional[float]) -> PhysicalParams:
        if gamma is None:
            gamma = gamma_crit(N, M) + DEFAULT_GAMMA_OFFSET
        return replace(self.params, N=N, M=M, gamma=gamma)


@contextmanager
def _environ_layer(layer: Dict[str, str]) -> Iterator[None]:
    """
    Let ``layer`` shadow the process environment while the keys are parsed.
    The previous values are restored on exit.
    """
    saved = {key: os.environ.get(key) for key in layer}
    os.environ.update(layer)
    try:
        yield
    finally:
        for key, value in saved.items():
            if value is None:
                os.environ.pop(key, None)
            else:
                os.environ[key] = value


def load_run_config(command: str, overrides: Dict[str, Any], config_path: Optional[str] = None,
                    threads: int = 1) -> RunConfig:
    """
    Assemble a run from the ``STM_REG_*`` keys of the environment, an
    optional flat KEY=value file and explicit ``overrides`` (keyed by
    RunConfig field, None meaning unset). Precedence: overrides, then the
    file, then the environment.
    """
    env = Env()
    layer: Dict[str, str] = {}
    if config_path is not None:
        path = Path(config_path)
        if not path.is_file() or not os.access(path, os.R_OK):
            raise ConfigError(f'cannot read config file {config_path}')
        layer = {key: value for key, value in dotenv_values(path).items() if value is not None}

    try:
        with _environ_layer(layer), env.prefixed('STM_REG_'):
            values = {
                'N': env.list('N', [2], subcast=int),
                'M': env.list('M', [1.0], subcast=float),
                'gamma': env.list('GAMMA', [], subcast=float),
                'alpha': env.float('ALPHA', 0.0),
                'b': env.float('B', 1.0),
                'lam': env.float('LAMBDA', 1.0),
                'ell_max': env.int('ELL_MAX', 8),
                'p_max': env.float('P_MAX', 40.0),
                'grid': env.int('GRID', 400),
                'seed': env.int('SEED', 7),
                'out': env.path('OUT', None),
                'format': env('FORMAT', 'csv'),
            }
    except EnvError as e:
        raise ConfigError(str(e))

    values.update({key: value for key, value in overrides.items() if value is not None})
    try:
        fmt = OutputFormat(str(values['format']).lower())
        cmd = Command(command)
    except ValueError as e:
        raise ConfigError(str(e))

    grids = SweepSpec(N=tuple(int(n) for n in values['N']), M=tuple(float(m) for m in values['M']),
                      gamma=tuple(float(g) for g in values['gamma']))
    N, M, gamma = grids.cells()[0]
    try:
        if gamma is None:
            gamma = gamma_crit(N, M) + DEFAULT_GAMMA_OFFSET
        params = PhysicalParams(N=N, M=M, gamma=gamma, alpha=values['alpha'], b=values['b'], lam=values['lam'])
    except ParameterError as e:
        raise ConfigError(str(e))

    out = Path(values['out']) if values['out'] is not None else None
    return RunConfig(command=cmd, params=params, grids=grids, ell_max=int(values['ell_max']),
                     p_max=float(values['p_max']), grid=int(values['grid']), seed=int(values['seed']),
                     out=out, format=fmt, threads=max(1, threads))
