"""Solver for two-parameter eigenvalue problems with rank-one coupling."""

from .structure import ProblemDef
from .version import __version__, __version_info__

__all__ = ("ProblemDef", "__version__", "__version_info__")
