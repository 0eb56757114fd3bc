"""Dense linear-algebra primitives used by the initializers.

Matrices are plain 2-D ``float64`` numpy arrays. Every public function
validates its inputs with :func:`as_matrix` and returns finite arrays.

The singular value decomposition is a one-sided Jacobi method with a
round-robin (tournament) pair ordering, so each round rotates ``n // 2``
disjoint column pairs at once as a single vectorised numpy update.
"""
from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .exceptions import NumericError, ParameterError, ShapeError

__all__ = [
    "SvdResult",
    "as_matrix",
    "matmul",
    "svd_full",
    "pinv",
    "orthogonal_factor",
    "gaussian_matrix",
    "JACOBI_TOL",
    "JACOBI_MAX_SWEEPS",
]

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 60


class SvdResult(NamedTuple):
    """Full SVD ``a = u @ diag(s) @ v.T`` with square orthogonal factors."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        k = self.s.shape[0]
        return (self.u[:, :k] * self.s) @ self.v[:, :k].T


def as_matrix(a, name: str = "a") -> np.ndarray:
    """Coerce ``a`` to a non-empty, finite, 2-D float64 array.

    Raises
    ------
    ShapeError
        If ``a`` is not two-dimensional or has a zero-length axis.
    NumericError
        If ``a`` contains NaN or infinite entries.
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ShapeError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"{name} contains non-finite entries")
    return arr


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


@lru_cache(maxsize=64)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Circle-method schedule: every column pair appears in exactly one round."""
    players = n + (n % 2)
    order = list(range(players))
    rounds = []
    for _ in range(players - 1):
        p, q = [], []
        for k in range(players // 2):
            i, j = order[k], order[players - 1 - k]
            if i < n and j < n:
                p.append(min(i, j))
                q.append(max(i, j))
        rounds.append((np.array(p, dtype=np.intp), np.array(q, dtype=np.intp)))
        order = [order[0], order[-1], *order[1:-1]]
    return tuple(rounds)


def _jacobi_orthogonalize(a: np.ndarray, tol: float, max_sweeps: int):
    """Rotate the columns of ``a`` until they are mutually orthogonal.

    Returns the rotated columns ``b = a @ v`` and the accumulated rotation ``v``.
    """
    # columns are stored as contiguous rows so each round gathers whole rows
    bt = np.array(a.T, order="C")
    n = bt.shape[0]
    vt = np.eye(n)
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        rotated = False
        for p, q in rounds:
            bp, bq = bt[p], bt[q]
            alpha = np.einsum("ij,ij->i", bp, bp)
            beta = np.einsum("ij,ij->i", bq, bq)
            gamma = np.einsum("ij,ij->i", bp, bq)
            active = np.abs(gamma) > tol * np.sqrt(alpha * beta)
            if not active.any():
                continue
            rotated = True
            if not active.all():
                p, q = p[active], q[active]
                alpha, beta, gamma = alpha[active], beta[active], gamma[active]
                bp, bq = bt[p], bt[q]
            zeta = (beta - alpha) / (2.0 * gamma)
            t = np.where(zeta >= 0.0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
            c = (1.0 / np.hypot(1.0, t))[:, None]
            s = c * t[:, None]
            bt[p] = c * bp - s * bq
            bt[q] = s * bp + c * bq
            vp, vq = vt[p], vt[q]
            vt[p] = c * vp - s * vq
            vt[q] = s * vp + c * vq
        if not rotated:
            return bt.T, vt.T
    raise NumericError(
        f"Jacobi SVD did not converge within {max_sweeps} sweeps", iteration=max_sweeps
    )


def _left_factor(b: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Square orthogonal ``u`` whose leading columns are ``b[:, k] / s[k]``.

    Columns whose direction is numerically meaningless (zero or
    rounding-dominated singular values) are replaced by a basis of the
    orthogonal complement.
    """
    m, n = b.shape
    u = np.zeros((m, m))
    filled = np.zeros(m, dtype=bool)
    for k in range(n):
        if s[k] == 0.0:
            continue
        w = b[:, k] / s[k]
        # two Gram-Schmidt passes keep u orthogonal to machine precision
        for _ in range(2):
            basis = u[:, filled]
            w = w - basis @ (basis.T @ w)
        norm = np.linalg.norm(w)
        if norm < 0.5:
            continue
        u[:, k] = w / norm
        filled[k] = True
    gaps = np.flatnonzero(~filled)
    if gaps.size:
        known = u[:, filled]
        if known.shape[1] == 0:
            complement = np.eye(m)
        else:
            q, _ = np.linalg.qr(known, mode="complete")
            complement = q[:, known.shape[1]:]
        u[:, gaps] = complement[:, : gaps.size]
    return u


def _svd_tall(a: np.ndarray, tol: float, max_sweeps: int):
    b, v = _jacobi_orthogonalize(a, tol, max_sweeps)
    s = np.linalg.norm(b, axis=0)
    order = np.argsort(-s, kind="stable")
    s, b, v = s[order], b[:, order], v[:, order]
    return _left_factor(b, s), s, v


def svd_full(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> SvdResult:
    """Full singular value decomposition by one-sided Jacobi rotations.

    Parameters
    ----------
    a : array_like, shape (q, p)
    tol : float
        A column pair is rotated while ``|<a_i, a_j>| > tol * |a_i| |a_j|``.
    max_sweeps : int
        Sweep cap; exceeding it raises :class:`NumericError`.

    Returns
    -------
    SvdResult
        ``u`` (q, q) and ``v`` (p, p) orthogonal, ``s`` of length
        ``min(q, p)`` sorted non-increasing. The largest-magnitude entry of
        every column of ``u`` is non-negative; ``v`` is flipped to match.
    """
    a = as_matrix(a)
    if a.shape[0] >= a.shape[1]:
        u, s, v = _svd_tall(a, tol, max_sweeps)
    else:
        v, s, u = _svd_tall(a.T, tol, max_sweeps)
    k = s.shape[0]
    pivots = np.argmax(np.abs(u), axis=0)
    flip = u[pivots, np.arange(u.shape[1])] < 0.0
    u[:, flip] *= -1.0
    v[:, np.flatnonzero(flip[:k])] *= -1.0
    return SvdResult(u, s, v)


def pinv(a) -> np.ndarray:
    """Moore-Penrose pseudo-inverse.

    Singular values at or below ``max(q, p) * eps * s_max`` are treated as zero.
    """
    a = as_matrix(a)
    u, s, v = svd_full(a)
    k = s.shape[0]
    cutoff = max(a.shape) * np.finfo(np.float64).eps * (s[0] if k else 0.0)
    keep = s > cutoff
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (v[:, :k] * inv) @ u[:, :k].T


def orthogonal_factor(a) -> np.ndarray:
    """Polar factor ``U_thin @ V_thin.T``: same shape as ``a``, unit singular values."""
    a = as_matrix(a)
    u, s, v = svd_full(a)
    k = s.shape[0]
    return u[:, :k] @ v[:, :k].T


def gaussian_matrix(rows: int, cols: int, std: float, rng) -> np.ndarray:
    """I.i.d. ``N(0, std**2)`` matrix drawn from ``rng``.

    ``rng`` is a :class:`numpy.random.Generator` or anything accepted by
    :func:`numpy.random.default_rng`.
    """
    if not std > 0:
        raise ParameterError(f"std must be positive, got {std}")
    if int(rows) < 1 or int(cols) < 1:
        raise ParameterError(f"matrix dimensions must be positive, got {rows}x{cols}")
    rng = np.random.default_rng(rng)
    return rng.standard_normal((int(rows), int(cols))) * std
