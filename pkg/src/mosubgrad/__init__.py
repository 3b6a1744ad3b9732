"""Descent subgradient method for unconstrained nonsmooth multiobjective optimization."""

from .core import (
    FesNonconvergenceError,
    InvariantViolation,
    IterationLimitError,
    MinNormError,
    Objective,
    ObjectiveOracle,
    Problem,
    RunRecord,
    SolverError,
    SolverParams,
    TRACE_PARAMS,
    tau_of,
)
from .linesearch import FesResult, LblsOutcome, fes, lbls
from .minnorm import MinNormResult, min_norm_point
from .problems import composite_problem, fl_problem, get_problem, sparse_problem
from .solver import Bundle, dssp, is_substationary, solve

__all__ = [
    "Bundle", "FesNonconvergenceError", "FesResult", "InvariantViolation",
    "IterationLimitError", "LblsOutcome", "MinNormError", "MinNormResult",
    "Objective", "ObjectiveOracle", "Problem", "RunRecord", "SolverError",
    "SolverParams", "TRACE_PARAMS", "composite_problem", "dssp", "fes",
    "fl_problem", "get_problem", "is_substationary", "lbls", "min_norm_point",
    "solve", "sparse_problem", "tau_of",
]
