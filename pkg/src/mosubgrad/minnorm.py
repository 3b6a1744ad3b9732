"""Least-norm point of the convex hull of finitely many generators.

Wolfe's min-norm-point algorithm: maintain a corral of affinely independent
generators, move to the least-norm point of their affine hull when it lies
inside the simplex, and otherwise step back to the boundary and drop the
vertex whose weight vanished.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MinNormError

DEDUP_TOL = 1e-14


@dataclass(frozen=True)
class MinNormResult:
    xi_star: np.ndarray
    lam: np.ndarray
    norm: float
    generators: np.ndarray  # (m, n), rows are the deduplicated generators

    def certificate_gap(self) -> float:
        """``min_j g_j . xi* - ||xi*||^2``; nonnegative up to round-off at optimality."""
        sq = float(self.xi_star @ self.xi_star)
        return float(np.min(self.generators @ self.xi_star) - sq)

    def certificate_ok(self) -> bool:
        sq = float(self.xi_star @ self.xi_star)
        return self.certificate_gap() >= -kkt_tol(sq)


def kkt_tol(norm_sq: float) -> float:
    return 1e-9 * max(1.0, norm_sq)


def dedup_generators(gens, tol: float = DEDUP_TOL) -> np.ndarray:
    """Rows of ``gens`` with component-wise near-duplicates removed (first kept)."""
    G = np.atleast_2d(np.asarray(gens, dtype=float))
    if G.shape[0] == 0:
        raise ValueError("generator set is empty")
    if not np.all(np.isfinite(G)):
        raise ValueError("generator set contains non-finite entries")
    if G.shape[0] == 1:
        return G
    # near-duplicates end up adjacent after a lexicographic sort
    order = np.lexsort(G.T[::-1])
    close = np.all(np.abs(np.diff(G[order], axis=0)) <= tol, axis=1)
    dropped = order[1:][close]
    keep = np.ones(G.shape[0], dtype=bool)
    keep[dropped] = False
    return G[keep]


def _affine_min(P: np.ndarray) -> np.ndarray:
    """Weights (summing to one) of the least-norm point in the affine hull of rows of P."""
    k = P.shape[0]
    if k == 1:
        return np.ones(1)
    ones = np.ones(k)
    # the weights are invariant to scaling P; lift small sets to unit size so
    # 1 1^T does not swamp P P^T
    top = float(np.max(np.abs(P)))
    if 0.0 < top < 1.0:
        P = P / top
    # For affinely independent rows, P P^T + 1 1^T is positive definite.
    M = P @ P.T + np.outer(ones, ones)
    try:
        w = np.linalg.solve(M, ones)
    except np.linalg.LinAlgError:
        w = np.linalg.lstsq(M, ones, rcond=None)[0]
    return w / w.sum()


def min_norm_point(gens, max_iter: int | None = None) -> MinNormResult:
    """Least-norm element of ``conv(gens)`` with convex weights.

    ``gens`` is an array-like of shape ``(m, n)`` (one generator per row).
    Raises :class:`MinNormError` if the optimality certificate
    ``g_j . xi* >= ||xi*||^2 - tol`` cannot be reached within ``10 n m``
    major iterations.
    """
    G = dedup_generators(gens)
    m, n = G.shape
    if max_iter is None:
        max_iter = max(10 * n * m, 50)
    gmax = float(np.sqrt(np.max(np.einsum("ij,ij->i", G, G))))

    sq_norms = np.einsum("ij,ij->i", G, G)
    start = int(np.argmin(sq_norms))
    S = [start]
    lam = np.ones(1)
    x = G[start].copy()

    best = None  # (xx, S, lam) of the smallest certified iterate seen so far
    for _ in range(max_iter):
        xx = float(x @ x)
        if xx == 0.0:
            break
        scores = G @ x
        j = int(np.argmin(scores))
        if scores[j] >= xx - kkt_tol(xx) and (best is None or xx < best[0]):
            best = (xx, list(S), lam.copy())
        # round-off in g . x scales with |g| |x|; never stop on a looser
        # tolerance than the certificate checks
        stop_tol = min(1e-12 * gmax * np.sqrt(xx), 0.5 * kkt_tol(xx))
        if scores[j] >= xx - stop_tol or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        # minor cycle
        while True:
            alpha = _affine_min(G[S])
            if np.all(alpha > 0.0):
                lam = alpha
                break
            # largest step toward alpha that keeps the weights nonnegative;
            # the blocking weight is zeroed exactly
            neg = np.flatnonzero(alpha <= 0.0)
            denom = lam[neg] - alpha[neg]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(denom > 0, lam[neg] / denom, 0.0)
            block = int(neg[np.argmin(ratios)])
            theta = float(np.min(ratios))
            lam = np.maximum(lam + theta * (alpha - lam), 0.0)
            lam[block] = 0.0
            keep = lam > 0.0
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
            if len(S) == 1:
                lam = np.ones(1)
                break
        x = lam @ G[S]
    else:
        # near the round-off floor the corral can keep cycling between
        # certified points; settle for the smallest one
        if best is None:
            raise MinNormError(f"min-norm point did not converge in {max_iter} iterations")
        _, S, lam = best

    full = np.zeros(m)
    full[S] = lam
    xi = full @ G
    result = MinNormResult(xi_star=xi, lam=full, norm=float(np.linalg.norm(xi)), generators=G)
    if not result.certificate_ok():
        raise MinNormError(
            f"KKT certificate violated (gap {result.certificate_gap():.3e}) for {m} generators"
        )
    return result
