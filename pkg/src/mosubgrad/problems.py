"""Test objectives, the composite problems P1-P15, FL and the sparse-recovery instance.

Max-type objectives are described by their smooth pieces. The value is the
largest piece; the returned subgradient is the gradient of the maximizing
piece with the smallest index, where pieces within ``TIE_TOL`` (relative) of
the maximum count as maximizers.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

import numpy as np

from .core import Objective, Problem

TIE_TOL = 1e-12


def _active_index(vals: np.ndarray) -> int:
    top = float(np.max(vals))
    tol = TIE_TOL * max(1.0, abs(top))
    return int(np.flatnonzero(vals >= top - tol)[0])


def max_type(name: str, values: Callable, grads: Callable, minimizer=None, min_value=None) -> Objective:
    """Build a max-type objective from piece values ``(k,)`` and piece gradients ``(k, n)``.

    ``values`` indexes coordinates along the leading axis, so it also
    vectorizes over a batch of points of shape ``(n, N)``.
    """

    def value(x):
        return np.max(values(x), axis=0)

    def subgrad(x):
        return np.asarray(grads(x)[_active_index(values(x))], dtype=float)

    def pieces(x):
        return values(x), grads(x)

    return Objective(name, value, subgrad, pieces, minimizer, min_value)


def _crescent(x):
    x1, x2 = x[0], x[1]
    a = x1**2 + (x2 - 1) ** 2
    return np.array([a + x2 - 1, -a + x2 + 1])


def _crescent_grads(x):
    x1, x2 = x[0], x[1]
    return np.array([[2 * x1, 2 * (x2 - 1) + 1], [-2 * x1, -2 * (x2 - 1) + 1]])


def _lq(x):
    x1, x2 = x[0], x[1]
    base = -x1 - x2
    return np.array([base, base + x1**2 + x2**2 - 1])


def _lq_grads(x):
    x1, x2 = x[0], x[1]
    return np.array([[-1.0, -1.0], [-1 + 2 * x1, -1 + 2 * x2]])


def _ql(x):
    x1, x2 = x[0], x[1]
    q = x1**2 + x2**2
    return np.array([q, q + 10 * (-4 * x1 - x2 + 4), q + 10 * (-x1 - 2 * x2 + 6)])


def _ql_grads(x):
    x1, x2 = x[0], x[1]
    return np.array(
        [[2 * x1, 2 * x2], [2 * x1 - 40, 2 * x2 - 10], [2 * x1 - 10, 2 * x2 - 20]]
    )


def _cb3(x):
    x1, x2 = x[0], x[1]
    e = np.exp(-x1 + x2)
    return np.array([x1**4 + x2**2, (2 - x1) ** 2 + (2 - x2) ** 2, 2 * e])


def _cb3_grads(x):
    x1, x2 = x[0], x[1]
    e = np.exp(-x1 + x2)
    return np.array(
        [[4 * x1**3, 2 * x2], [-2 * (2 - x1), -2 * (2 - x2)], [-2 * e, 2 * e]]
    )


def _dem(x):
    x1, x2 = x[0], x[1]
    return np.array([5 * x1 + x2, -5 * x1 + x2, x1**2 + x2**2 + 4 * x2])


def _dem_grads(x):
    x1, x2 = x[0], x[1]
    return np.array([[5.0, 1.0], [-5.0, 1.0], [2 * x1, 2 * x2 + 4]])


def _mifflin1(x):
    # -x1 + 20 max(r - 1, 0) written as a max of two smooth pieces
    x1, x2 = x[0], x[1]
    h = x1**2 + x2**2 - 1
    return np.array([-x1 + 20 * h, -x1 + 0 * h])  # 0*h keeps batch shape


def _mifflin1_grads(x):
    x1, x2 = x[0], x[1]
    return np.array([[-1 + 40 * x1, 40 * x2], [-1.0, 0.0]])


def _mifflin2(x):
    # -x1 + 2h + 1.75|h| = max(-x1 + 3.75 h, -x1 + 0.25 h)
    x1, x2 = x[0], x[1]
    h = x1**2 + x2**2 - 1
    return np.array([-x1 + 3.75 * h, -x1 + 0.25 * h])


def _mifflin2_grads(x):
    x1, x2 = x[0], x[1]
    return np.array([[-1 + 7.5 * x1, 7.5 * x2], [-1 + 0.5 * x1, 0.5 * x2]])


_SQRT_HALF = 1.0 / math.sqrt(2.0)

OBJECTIVES = {
    "Crescent": max_type("Crescent", _crescent, _crescent_grads, (0.0, 0.0), 0.0),
    "LQ": max_type("LQ", _lq, _lq_grads, (_SQRT_HALF, _SQRT_HALF), -math.sqrt(2.0)),
    "QL": max_type("QL", _ql, _ql_grads, (1.2, 2.4), 7.2),
    "CB3": max_type("CB3", _cb3, _cb3_grads, (1.0, 1.0), 2.0),
    "DEM": max_type("DEM", _dem, _dem_grads, (0.0, -3.0), -3.0),
    "Mifflin1": max_type("Mifflin1", _mifflin1, _mifflin1_grads, (1.0, 0.0), -1.0),
    "Mifflin2": max_type("Mifflin2", _mifflin2, _mifflin2_grads, (1.0, 0.0), -1.0),
}

crescent = OBJECTIVES["Crescent"].value
crescent_subgrad = OBJECTIVES["Crescent"].subgrad

COMPOSITES = {
    1: ("Crescent", "LQ"),
    2: ("Mifflin2", "Crescent"),
    3: ("Crescent", "QL"),
    4: ("CB3", "LQ"),
    5: ("CB3", "Mifflin1"),
    6: ("Mifflin2", "Mifflin1"),
    7: ("CB3", "QL"),
    8: ("Mifflin2", "DEM"),
    9: ("Mifflin2", "LQ"),
    10: ("CB3", "DEM"),
    11: ("DEM", "QL", "Mifflin1"),
    12: ("Mifflin2", "Crescent", "Mifflin1"),
    13: ("DEM", "QL", "Mifflin1", "CB3"),
    14: ("Mifflin2", "Crescent", "DEM", "Mifflin1"),
    15: ("Mifflin2", "Crescent", "DEM", "Mifflin1", "QL"),
}

# start-point presets: (lo, hi) per coordinate, plus grid size where relevant
BOX_FRONT = (0.0, 2.0)
GRID_COMPARE = (13, (-3.0, 3.0))


def composite_problem(pid: int) -> Problem:
    if pid not in COMPOSITES:
        raise KeyError(f"unknown composite problem id {pid!r}; valid ids are 1..15")
    names = COMPOSITES[pid]
    return Problem(f"P{pid}", 2, tuple(OBJECTIVES[nm] for nm in names))


# --- FL: smooth, periodic bi-objective on the real line -------------------

_C6, _S6 = math.cos(0.6), math.sin(-0.6)


def _fl_parts(x):
    x = np.asarray(x, dtype=float)
    t = x[0] if x.ndim >= 1 else x
    h = 1 + 0.1 * np.sin(8 * t)
    dh = 0.8 * np.cos(8 * t)
    u1 = np.cos(t) * _C6 - _S6 * np.sin(t)
    du1 = -np.sin(t) * _C6 - _S6 * np.cos(t)
    u2 = np.cos(t) * _S6 + np.sin(t) * _C6
    du2 = -np.sin(t) * _S6 + np.cos(t) * _C6
    return h, dh, u1, du1, u2, du2


def _fl1(x):
    h, _, u1, *_ = _fl_parts(x)
    return h * u1


def _fl1_grad(x):
    h, dh, u1, du1, _, _ = _fl_parts(x)
    return np.array([dh * u1 + h * du1])


def _fl2(x):
    h, _, _, _, u2, _ = _fl_parts(x)
    return h * u2


def _fl2_grad(x):
    h, dh, _, _, u2, du2 = _fl_parts(x)
    return np.array([dh * u2 + h * du2])


def fl_problem() -> Problem:
    return Problem(
        "FL",
        1,
        (Objective("FL1", _fl1, _fl1_grad), Objective("FL2", _fl2, _fl2_grad)),
        meta={"box": (0.0, 2 * math.pi)},
    )


def fl_g(x) -> float:
    """Product of the two FL derivatives; substationary points have it <= 0."""
    return float(_fl1_grad(np.atleast_1d(x))[0] * _fl2_grad(np.atleast_1d(x))[0])


# --- sparse recovery: (||x||_1, ||Ax - b||^2) ------------------------------


@lru_cache(maxsize=16)
def sparse_instance(seed: int, m: int = 50, n: int = 100) -> tuple:
    """``(A, b)`` with i.i.d. standard normal entries.

    Generated by ``numpy.random.default_rng(seed)`` (PCG64): first ``A`` in
    row-major order via ``standard_normal((m, n))``, then ``b`` via
    ``standard_normal(m)``.
    """
    if not m < n:
        raise ValueError("the sparse instance needs m < n")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    b = rng.standard_normal(m)
    A.setflags(write=False)
    b.setflags(write=False)
    return A, b


def sparse_problem(seed: int, m: int = 50, n: int = 100) -> Problem:
    A, b = sparse_instance(seed, m, n)

    def l1(x):
        return float(np.sum(np.abs(x)))

    def l1_sub(x):
        return np.sign(x).astype(float)

    def resid(x):
        r = A @ x - b
        return float(r @ r)

    def resid_grad(x):
        return 2.0 * (A.T @ (A @ x - b))

    return Problem(
        f"SPARSE:{seed}",
        n,
        (Objective("L1", l1, l1_sub), Objective("Residual", resid, resid_grad)),
        meta={"A": A, "b": b, "seed": seed},
    )


def count_zero(x, threshold: float = 1e-3) -> int:
    return int(np.sum(np.abs(np.asarray(x)) < threshold))


def get_problem(pid: str) -> Problem:
    """Resolve a registry id: ``P1``..``P15``, ``FL`` or ``SPARSE:<seed>``."""
    key = pid.strip()
    upper = key.upper()
    if upper == "FL":
        return fl_problem()
    if upper.startswith("SPARSE:"):
        try:
            seed = int(key.split(":", 1)[1])
        except ValueError as exc:
            raise KeyError(f"bad sparse problem id {pid!r}") from exc
        return sparse_problem(seed)
    if upper.startswith("P") and upper[1:].isdigit():
        return composite_problem(int(upper[1:]))
    raise KeyError(f"unknown problem id {pid!r}")


def weighted_sum_problem(problem: Problem, lam: float) -> Problem:
    """Single-objective scalarization ``lam f1 + (1 - lam) f2`` of a bi-objective problem."""
    if problem.p != 2:
        raise ValueError("weighted sums are only defined here for bi-objective problems")
    f1, f2 = problem.objectives

    def value(x):
        return lam * f1.value(x) + (1 - lam) * f2.value(x)

    def subgrad(x):
        return lam * np.asarray(f1.subgrad(x)) + (1 - lam) * np.asarray(f2.subgrad(x))

    return Problem(f"WS[{problem.name},{lam:g}]", problem.dim, (Objective("WS", value, subgrad),))
