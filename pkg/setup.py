import os
from setuptools import find_packages, setup


setup(
    name             =   'stmreg',
    version          =   os.getenv('BUILD_VERSION', '0.0.0'),
    description      =   'Numerical bounds for regularized zero-range three-body forms',
    author           =   'stmreg developers',
    packages         =   find_packages(exclude=['tests', 'tests.*']),
    install_requires =   ['numpy', 'scipy', 'pandas', 'environs', 'python-dotenv', 'pyserde', 'jinja2'],
    entry_points     =   {
        'console_scripts': ['stmreg = stmreg.cli:main']
    },
    license          =   'MIT',
    zip_safe         =   False,
    python_requires  =   '>=3.10.2'
)
