"""Descent subgradient method for nonsmooth multiobjective problems.

:func:`dssp` iterates from a start point until the least-norm element of the
convex hull of the collected eps-subgradients has norm at most ``delta``;
:func:`solve` repeats it while shrinking ``eps`` and ``delta`` geometrically.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    InvariantViolation,
    IterationLimitError,
    Problem,
    RunRecord,
    SolverError,
    SolverParams,
    as_point,
    total_counts,
)
from .linesearch import fes, lbls
from .minnorm import DEDUP_TOL, MinNormResult, min_norm_point

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BundleEntry:
    xi: np.ndarray
    point: np.ndarray  # where the subgradient was evaluated
    source: str  # "initial", "serious-reset" or "fes"


class Bundle:
    """Per-objective lists of eps-subgradients collected around one serious iterate."""

    def __init__(self, p: int):
        self.columns: list = [[] for _ in range(p)]

    @property
    def p(self) -> int:
        return len(self.columns)

    def reset(self, subgrads, point: np.ndarray, source: str) -> None:
        self.columns = [[BundleEntry(np.asarray(g, float), point, source)] for g in subgrads]

    def add(self, i: int, xi: np.ndarray, point: np.ndarray, source: str = "fes") -> bool:
        """Append to column ``i`` unless an identical vector is already pooled."""
        for col in self.columns:
            for e in col:
                if np.all(np.abs(e.xi - xi) <= DEDUP_TOL):
                    return False
        self.columns[i].append(BundleEntry(np.asarray(xi, float), point, source))
        return True

    def generators(self) -> np.ndarray:
        return np.array([e.xi for col in self.columns for e in col])

    def __len__(self) -> int:
        return sum(len(col) for col in self.columns)

    def max_distance(self, x: np.ndarray) -> float:
        return max(float(np.linalg.norm(e.point - x)) for col in self.columns for e in col)


def is_substationary(bundle, delta: float) -> tuple:
    """``(||xi*|| <= delta, result)`` for the pooled generators of ``bundle``.

    ``bundle`` may be a :class:`Bundle` or an array of generators (one per row).
    """
    gens = bundle.generators() if isinstance(bundle, Bundle) else bundle
    res = min_norm_point(gens)
    return res.norm <= delta, res


@dataclass
class TraceRow:
    """One inner iteration; the closing row of a block has ``direction=None``."""

    nu: int
    k: int
    xi_norm: float
    direction: Optional[np.ndarray] = None
    failing: tuple = ()
    step: float = 0.0
    x: Optional[np.ndarray] = None  # iterate before the step
    x_next: Optional[np.ndarray] = None
    f_prev: Optional[np.ndarray] = None
    f_next: Optional[np.ndarray] = None
    fes: tuple = ()  # (objective index, FesResult) pairs of a null step
    eps: float = float("nan")
    delta: float = float("nan")


@dataclass
class DsspStats:
    iters: int = 0
    serious_steps: int = 0
    null_steps: int = 0
    final: Optional[MinNormResult] = None
    values: Optional[np.ndarray] = None
    fes_calls: int = 0
    max_fes_iters_seen: int = 0


def dssp(
    problem: Problem,
    x0,
    eps: float,
    delta: float,
    params: SolverParams,
    oracles: Optional[list] = None,
    trace: Optional[list] = None,
    nu: int = 0,
    check: bool = False,
) -> tuple:
    """Return ``(x, stats)`` with ``x`` a (delta, S_eps(x))-substationary point.

    ``oracles`` are the counting oracles of the current run (fresh ones are
    made if omitted). With ``check=True`` the sufficient-decrease and
    null-step progress invariants are asserted at every step.
    """
    if not (eps > 0 and delta > 0):
        raise ValueError("eps and delta must be positive")
    if oracles is None:
        oracles = problem.oracles()
    x = as_point(x0, problem.dim)
    tbar = params.tbar(eps)
    if not params.t0 > tbar:
        raise ValueError("t0 must exceed tbar")

    fx = np.array([o.eval(x) for o in oracles])
    bundle = Bundle(problem.p)
    bundle.reset([o.subgrad(x) for o in oracles], x, "initial")
    stats = DsspStats()

    for k in range(params.max_dssp_iters):
        stop, res = is_substationary(bundle, delta)
        if stop:
            stats.iters = k
            stats.final = res
            stats.values = fx
            if trace is not None:
                trace.append(TraceRow(nu, k, res.norm, x=x.copy(), f_prev=fx.copy(), eps=eps, delta=delta))
            return x, stats
        if res.norm == 0.0:
            raise InvariantViolation("zero min-norm element passed the stopping test")

        d = -res.xi_star / res.norm
        d = d / np.linalg.norm(d)
        out = lbls(oracles, x, d, res.norm, params.beta, tbar, params.r, params.t0, fx=fx)
        row = None
        if trace is not None:
            row = TraceRow(nu, k, res.norm, d, out.failing, out.t, x.copy(), None, fx.copy(), eps=eps, delta=delta)

        if out.serious:
            if check and np.any(out.values - fx > -params.beta * out.t * res.norm):
                raise InvariantViolation("serious step without sufficient decrease")
            x = x + out.t * d
            fx = out.values
            bundle.reset([o.subgrad(x) for o in oracles], x, "serious-reset")
            stats.serious_steps += 1
        else:
            found = []
            for i in out.failing:
                fr = fes(
                    oracles[i], x, d, res.norm, eps, params.beta, params.c, tbar,
                    params.max_fes_iters, fx=fx[i],
                )
                found.append((i, fr))
                stats.fes_calls += 1
                stats.max_fes_iters_seen = max(stats.max_fes_iters_seen, fr.iters)
                bundle.add(i, fr.xi, x + fr.t * d)
            if check:
                new_norm = min_norm_point(bundle.generators()).norm
                if not new_norm < res.norm + 1e-12:
                    raise InvariantViolation("null step did not reduce the min-norm element")
            stats.null_steps += 1
            if row is not None:
                row.fes = tuple(found)

        if row is not None:
            row.x_next = x.copy()
            row.f_next = fx.copy()
            trace.append(row)

    raise IterationLimitError(
        f"inner loop exceeded {params.max_dssp_iters} iterations (eps={eps:g}, delta={delta:g})"
    )


def solve(
    problem: Problem,
    x0,
    params: Optional[SolverParams] = None,
    trace: Optional[list] = None,
    check: bool = False,
) -> RunRecord:
    """Shrink ``eps`` and ``delta`` by ``gamma`` per outer round until both fall below ``rho``.

    Returns a :class:`RunRecord`; ``converged`` is False if the outer cap is
    hit. Errors from the inner loop propagate.
    """
    params = params or SolverParams()
    x = as_point(x0, problem.dim)
    start = x.copy()
    oracles = problem.oracles()
    eps, delta = params.eps0, params.delta0
    rec = RunRecord(final_point=x, final_values=problem.values(x), converged=False, start_point=start)
    t_start = time.perf_counter()

    for nu in range(params.max_outer_iters):
        x, st = dssp(problem, x, eps, delta, params, oracles=oracles, trace=trace, nu=nu, check=check)
        rec.outer_iters = nu
        rec.inner_iters += st.iters
        rec.serious_steps += st.serious_steps
        rec.null_steps += st.null_steps
        rec.final_point = x
        rec.final_values = st.values.copy()
        rec.final_eps, rec.final_delta = eps, delta
        rec.final_xi_norm = st.final.norm
        rec.certificate_ok = bool(st.final.certificate_ok() and st.final.norm <= delta)
        log.debug("nu=%d eps=%.3g delta=%.3g x=%s |xi*|=%.3g", nu, eps, delta, x, st.final.norm)
        if delta < params.rho and eps < params.rho:
            rec.converged = True
            break
        eps *= params.gamma
        delta *= params.gamma

    rec.fun_evals, rec.sub_evals = total_counts(oracles)
    rec.wall_time = time.perf_counter() - t_start
    return rec


def solve_safe(problem: Problem, x0, params: Optional[SolverParams] = None) -> RunRecord:
    """Like :func:`solve` but turns solver errors into an unconverged record."""
    params = params or SolverParams()
    try:
        return solve(problem, x0, params)
    except SolverError as exc:
        x = as_point(x0, problem.dim)
        return RunRecord(
            final_point=x, final_values=problem.values(x), converged=False,
            start_point=x.copy(), error=f"{type(exc).__name__}: {exc}",
        )
