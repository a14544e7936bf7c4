"""Bayesian optimal fingerprinting: Laplacian and EOF covariance bases, two-fit MCMC, validation."""

from ._bofp import *  # noqa: F401,F403
from ._bofp import DataError, NumericalError, __doc__  # noqa: F401
