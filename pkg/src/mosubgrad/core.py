"""Shared domain types: objectives, counting oracles, problems, parameters, run records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Optional, Sequence

import numpy as np


class SolverError(RuntimeError):
    """Base class for failures raised by the solver stack."""


class IterationLimitError(SolverError):
    """A safeguard iteration cap was exceeded."""


class FesNonconvergenceError(IterationLimitError):
    """The effective-subgradient search did not meet its acceptance test in time."""


class MinNormError(SolverError):
    """The min-norm subproblem could not produce a valid optimality certificate."""


class InvariantViolation(AssertionError):
    """An internal invariant of the method failed at runtime."""


def as_point(x, dim: Optional[int] = None) -> np.ndarray:
    """Copy ``x`` into a finite 1-D float array, optionally checking its length."""
    arr = np.array(x, dtype=float).reshape(-1)
    if arr.size < 1:
        raise ValueError("point must have at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"point has non-finite entries: {arr}")
    if dim is not None and arr.size != dim:
        raise ValueError(f"expected a point of dimension {dim}, got {arr.size}")
    return arr


@dataclass(frozen=True)
class Objective:
    """A locally Lipschitz scalar function with a Clarke subgradient selector.

    ``pieces`` is optional and only used for max-type functions: it maps ``x``
    to the tuple ``(values, gradients)`` of all smooth pieces, which lets tests
    pool the gradients of every active piece.
    """

    name: str
    value: Callable[[np.ndarray], float]
    subgrad: Callable[[np.ndarray], np.ndarray]
    pieces: Optional[Callable[[np.ndarray], tuple]] = None
    minimizer: Optional[tuple] = None
    min_value: Optional[float] = None


class ObjectiveOracle:
    """Counting wrapper around an :class:`Objective` owned by a single run."""

    def __init__(self, objective: Objective):
        self.objective = objective
        self.fun_count = 0
        self.sub_count = 0

    @property
    def name(self) -> str:
        return self.objective.name

    def eval(self, x: np.ndarray) -> float:
        self.fun_count += 1
        return float(self.objective.value(x))

    def subgrad(self, x: np.ndarray) -> np.ndarray:
        self.sub_count += 1
        return np.array(self.objective.subgrad(x), dtype=float).reshape(-1)

    def __repr__(self) -> str:
        return f"ObjectiveOracle({self.name!r}, fun={self.fun_count}, sub={self.sub_count})"


@dataclass(frozen=True)
class Problem:
    """Ordered objectives ``f_1..f_p`` over ``R^dim``; immutable and shareable."""

    name: str
    dim: int
    objectives: tuple
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if len(self.objectives) < 1:
            raise ValueError("a problem needs at least one objective")
        object.__setattr__(self, "objectives", tuple(self.objectives))

    @property
    def p(self) -> int:
        return len(self.objectives)

    def oracles(self) -> list:
        """Fresh counting oracles; every run gets its own set."""
        return [ObjectiveOracle(obj) for obj in self.objectives]

    def values(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        return np.array([obj.value(x) for obj in self.objectives])


def tau_of(tbar: float, t0: float, r: float) -> int:
    """Number of backtracks with ``r**tau * t0 > tbar > r**(tau+1) * t0``."""
    if not (0.0 < tbar < t0):
        raise ValueError(f"need 0 < tbar < t0, got tbar={tbar}, t0={t0}")
    if not (0.0 < r < 1.0):
        raise ValueError(f"need 0 < r < 1, got r={r}")
    tau = math.ceil((math.log(tbar) - math.log(t0)) / math.log(r) - 1.0)
    return max(tau, 0)


@dataclass(frozen=True)
class SolverParams:
    eps0: float = 0.1
    delta0: float = 0.1
    gamma: float = 0.1
    beta: float = 1e-6
    c: float = 0.01
    eta: float = 0.25
    r: float = 0.5
    t0: float = 2.0
    tbar_fraction: float = 0.1
    rho: float = 1e-3
    max_fes_iters: int = 100
    max_dssp_iters: int = 10000
    max_outer_iters: int = 60

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not (self.eps0 > 0 and self.delta0 > 0):
            raise ValueError("eps0 and delta0 must be positive")
        if not (0 < self.gamma < 1):
            raise ValueError("gamma must lie in (0, 1)")
        if not (0 < self.beta < self.c < 1):
            raise ValueError("need 0 < beta < c < 1")
        if not (0 < self.eta < 0.5):
            raise ValueError("eta must lie in (0, 0.5)")
        if not (0 < self.r < 1):
            raise ValueError("r must lie in (0, 1)")
        if not (0 < self.tbar_fraction < 1):
            raise ValueError("tbar_fraction must lie in (0, 1)")
        if self.rho < 0:
            raise ValueError("rho must be nonnegative")
        if self.t0 <= self.tbar_fraction * self.eps0:
            # eps only shrinks, so checking the first round covers all of them
            raise ValueError("t0 must exceed tbar = tbar_fraction * eps0")
        for name in ("max_fes_iters", "max_dssp_iters", "max_outer_iters"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")

    def tbar(self, eps: float) -> float:
        return self.tbar_fraction * eps

    def with_overrides(self, **overrides) -> "SolverParams":
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"unknown solver parameters: {sorted(unknown)}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


# The run used for the worked trace on P1.
TRACE_PARAMS = SolverParams(
    eps0=0.1, delta0=0.3, gamma=0.5, tbar_fraction=0.5, t0=0.25, rho=5e-3
)


@dataclass
class RunRecord:
    final_point: np.ndarray
    final_values: np.ndarray
    converged: bool
    outer_iters: int = 0
    inner_iters: int = 0
    serious_steps: int = 0
    null_steps: int = 0
    fun_evals: int = 0
    sub_evals: int = 0
    wall_time: float = 0.0
    start_point: Optional[np.ndarray] = None
    final_eps: float = float("nan")
    final_delta: float = float("nan")
    final_xi_norm: float = float("nan")
    certificate_ok: bool = False
    error: Optional[str] = None

    @property
    def p(self) -> int:
        return int(np.size(self.final_values))


def total_counts(oracles: Sequence[ObjectiveOracle]) -> tuple:
    return (
        sum(o.fun_count for o in oracles),
        sum(o.sub_count for o in oracles),
    )
