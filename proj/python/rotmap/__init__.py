"""Regularised quadratic optimal transport: solver, maps, rate scans and audits."""

from ._rotmap import *  # noqa: F401,F403
from ._rotmap import NonConvergenceError, __doc__  # noqa: F401
