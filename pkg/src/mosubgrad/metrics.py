"""Pareto-front post-processing: dominance filtering and hole-size indicators."""

from __future__ import annotations

import numpy as np


def _as_front(points) -> np.ndarray:
    Y = np.atleast_2d(np.asarray(points, dtype=float))
    if Y.shape[0] == 0:
        raise ValueError("front is empty")
    if not np.all(np.isfinite(Y)):
        raise ValueError("front contains non-finite values")
    return Y


def dominates(y, z) -> bool:
    y, z = np.asarray(y), np.asarray(z)
    return bool(np.all(y <= z) and np.any(y != z))


def filter_nondominated(points) -> np.ndarray:
    """Points not dominated by any other point, ordered by the first objective (stable)."""
    Y = _as_front(points)
    keep = np.ones(len(Y), dtype=bool)
    for j in range(len(Y)):
        le = np.all(Y <= Y[j], axis=1)
        ne = np.any(Y != Y[j], axis=1)
        if np.any(le & ne):
            keep[j] = False
    kept = Y[keep]
    return kept[np.argsort(kept[:, 0], kind="stable")]


def _gaps(front) -> np.ndarray:
    Y = _as_front(front)
    if Y.shape[1] != 2:
        raise ValueError("hole-size indicators are defined for bi-objective fronts only")
    if len(Y) < 2:
        raise ValueError("hole-size indicators need at least two points")
    Y = Y[np.argsort(Y[:, 0], kind="stable")]
    return np.linalg.norm(np.diff(Y, axis=0), axis=1)


def has(front) -> float:
    """Hole absolute size: the largest gap between consecutive points sorted by ``f1``."""
    return float(np.max(_gaps(front)))


def hrs(front) -> float:
    """Hole relative size: the largest gap divided by the mean gap."""
    d = _gaps(front)
    mean = float(np.mean(d))
    if mean == 0.0:
        raise ValueError("all front points coincide; relative hole size is undefined")
    return float(np.max(d) / mean)


def front_metrics(front) -> dict:
    return {"size": int(len(_as_front(front))), "HAS": has(front), "HRS": hrs(front)}
