"""Replica thresholds and basis-pursuit experiments for Lp compressed sensing."""

from ._cslab import *  # noqa: F401,F403
from ._cslab import CslabError, InvalidArgument, NoSolution, ConvergenceFailure  # noqa: F401

__version__ = "0.1.0"
