"""Limited backtracking line search and the effective-subgradient search.

Objective indices are 0-based throughout the Python API.
"""

from __future__ import annotations

from typing import NamedTuple, Optional, Sequence

import numpy as np

from .core import FesNonconvergenceError, ObjectiveOracle, tau_of


class LblsOutcome(NamedTuple):
    """``t > 0`` with an empty ``failing`` set is a serious step; ``t == 0`` is a null step.

    ``values`` holds the objective values at the accepted point for a serious
    step, and ``None`` for a null step.
    """

    t: float
    failing: tuple
    values: Optional[np.ndarray] = None

    @property
    def serious(self) -> bool:
        return self.t > 0


class FesResult(NamedTuple):
    xi: np.ndarray
    t: float  # step at which xi was sampled; always in (0, eps)
    iters: int  # number of probes, equal to the subgradient calls made


def step_grid(tbar: float, t0: float, r: float) -> list:
    tau = tau_of(tbar, t0, r)
    return [t0 * r**j for j in range(tau + 1)] + [tbar]


def lbls(
    oracles: Sequence[ObjectiveOracle],
    x: np.ndarray,
    d: np.ndarray,
    xi_norm: float,
    beta: float,
    tbar: float,
    r: float,
    t0: float,
    fx: Optional[np.ndarray] = None,
) -> LblsOutcome:
    """Try the steps ``t0, r t0, ..., r^tau t0, tbar`` for simultaneous sufficient decrease.

    Objectives are checked in index order and a candidate step is abandoned at
    the first objective that fails, so a serious step costs at most ``p``
    function calls per tried step. ``fx`` caches ``f_i(x)``.
    """
    if abs(float(np.linalg.norm(d)) - 1.0) > 1e-12:
        raise ValueError("search direction must have unit norm")
    if not xi_norm > 0:
        raise ValueError("xi_norm must be positive")
    if fx is None:
        fx = np.array([o.eval(x) for o in oracles])
    p = len(oracles)

    at_tbar = {}
    for t in step_grid(tbar, t0, r):
        y = x + t * d
        bound = -beta * t * xi_norm
        vals = np.empty(p)
        ok = True
        for i, oracle in enumerate(oracles):
            vals[i] = oracle.eval(y)
            if t == tbar:
                at_tbar[i] = vals[i]
            if vals[i] - fx[i] > bound:
                ok = False
                break
        if ok:
            return LblsOutcome(t, (), vals)

    # no step accepted: estimate which objectives need a better bundle
    y = x + tbar * d
    bound = -beta * tbar * xi_norm
    failing = []
    for i, oracle in enumerate(oracles):
        val = at_tbar[i] if i in at_tbar else oracle.eval(y)
        if val - fx[i] > bound:
            failing.append(i)
    return LblsOutcome(0.0, tuple(failing), None)


def fes(
    oracle: ObjectiveOracle,
    x: np.ndarray,
    d: np.ndarray,
    xi_norm: float,
    eps: float,
    beta: float,
    c: float,
    tbar: float,
    max_iters: int = 100,
    fx: Optional[float] = None,
    brackets: Optional[list] = None,
) -> FesResult:
    """Find a subgradient of one objective, sampled within ``eps`` along ``d``,
    with ``xi . d >= -c * xi_norm``.

    The first sample is taken at ``x + tbar d``. Each probe tests sufficient
    decrease at the current step to shrink the bracket ``[tl, tu]`` (starting
    at ``[0, eps]``), then checks the acceptance test; the next step is the
    bracket midpoint. If ``brackets`` is a list, the bracket after each probe
    is appended to it.
    """
    if not xi_norm > 0:
        raise ValueError("xi_norm must be positive")
    if not 0 < tbar < eps:
        raise ValueError("need 0 < tbar < eps")
    if fx is None:
        fx = oracle.eval(x)
    t = tbar
    xi = oracle.subgrad(x + t * d)
    lo, hi = 0.0, eps
    for s in range(max_iters):
        if oracle.eval(x + t * d) - fx <= -beta * t * xi_norm:
            lo = t
        else:
            hi = t
        if brackets is not None:
            brackets.append((lo, hi))
        if float(xi @ d) >= -c * xi_norm:
            return FesResult(xi, t, s + 1)
        if s + 1 == max_iters:
            break
        t = 0.5 * (lo + hi)
        xi = oracle.subgrad(x + t * d)
    raise FesNonconvergenceError(
        f"effective subgradient search for {oracle.name} exceeded {max_iters} probes"
    )
