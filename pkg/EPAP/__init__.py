"""
EPAP: Euler-Poisson Asymptotic Preserving solver

EPAP integrates the one-fluid Euler-Poisson system of plasma physics
with penalized IMEX Runge-Kutta schemes whose stability does not
depend on the scaled Debye length. As the Debye length goes to zero
the schemes become consistent schemes for the quasi-neutral limit.

EPAP runs single simulations, convergence studies against the
quasi-neutral limit and asymptotic scaling studies, and writes their
results as CSV files.
"""


__author__ = 'EPAP developers'
__version__ = '1.0.0'

from .main import Experiment
from . import params
