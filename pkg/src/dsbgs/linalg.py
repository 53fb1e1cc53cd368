"""Dense matrix kernels: norms, SVD, spectral quantities, pseudoinverse oracle.

The SVD is computed in-repo (Householder QR reduction followed by a
one-sided Jacobi orthogonalization) so the pseudoinverse oracle used for
stopping rules and verification does not depend on an external solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_RANK_TOL = 1e-10
DEFAULT_CONSISTENCY_TOL = 1e-8

# Jacobi sweeps stop once every column pair satisfies
# |w_p . w_q| <= _JACOBI_TOL * ||w_p|| ||w_q||.
_JACOBI_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 60


class ZeroMatrixError(ValueError):
    """Raised where a nonzero matrix is required."""


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return `a` as a 2-D float64 array with finite entries."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.shape[0] == 0 or m.shape[1] == 0:
        raise ValueError(f"{name} must have at least one row and one column")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def as_vector(v, length: int | None = None, name: str = "vector") -> np.ndarray:
    """Validate and return `v` as a 1-D float64 array, optionally of fixed length."""
    u = np.asarray(v, dtype=float)
    if u.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got ndim={u.ndim}")
    if length is not None and u.shape[0] != length:
        raise ValueError(f"{name} has length {u.shape[0]}, expected {length}")
    if not np.all(np.isfinite(u)):
        raise ValueError(f"{name} contains non-finite entries")
    return u


@dataclass(frozen=True)
class SpectralInfo:
    """Spectral summary of a nonzero matrix.

    sigma_max is the largest singular value, sigma_min_pos the smallest
    singular value retained by the rank cut, rank the number of retained
    singular values, frob_sq the squared Frobenius norm, and cond the
    ratio sigma_max / sigma_min_pos.
    """

    sigma_max: float
    sigma_min_pos: float
    rank: int
    frob_sq: float
    cond: float


@dataclass(frozen=True)
class OracleSolution:
    """Minimum-norm least-squares solution and projected initial guess.

    x_pinv is the pseudoinverse solution of A x = b, x0_star the orthogonal
    projection of the supplied initial guess onto the solution set, and
    consistent records whether b lies in the range of A (within tolerance).
    """

    x_pinv: np.ndarray
    x0_star: np.ndarray
    consistent: bool


def frobenius_norm_sq(m) -> float:
    """Sum of squared entries of `m`; zero iff `m` is the zero matrix."""
    a = as_matrix(m)
    return float(np.sum(a * a))


def matvec(a, x) -> np.ndarray:
    """Dense product A @ x with dimension checks."""
    m = as_matrix(a, "A")
    v = as_vector(x, m.shape[1], "x")
    return m @ v


def matvec_transpose(a, y) -> np.ndarray:
    """Dense product A.T @ y with dimension checks."""
    m = as_matrix(a, "A")
    v = as_vector(y, m.shape[0], "y")
    return m.T @ v


def _householder_qr(a: np.ndarray):
    """Reduce `a` (m >= n) to upper-triangular form by Householder reflectors.

    Returns (reflectors, R) where reflectors[j] is the unit vector of the
    j-th reflector acting on rows j..m (None for a no-op step).
    """
    r = a.copy()
    m, n = r.shape
    reflectors: list[np.ndarray | None] = []
    for j in range(n):
        x = r[j:, j]
        norm_x = math.sqrt(float(x @ x))
        if norm_x == 0.0:
            reflectors.append(None)
            continue
        v = x.copy()
        # v = x + sign(x0) ||x|| e0 avoids cancellation
        v[0] += norm_x if v[0] >= 0 else -norm_x
        vnorm = math.sqrt(float(v @ v))
        if vnorm == 0.0:
            reflectors.append(None)
            continue
        v /= vnorm
        r[j:, j:] -= np.outer(2.0 * v, v @ r[j:, j:])
        reflectors.append(v)
    return reflectors, np.triu(r[:n, :])


def _apply_q(reflectors, b: np.ndarray, m: int) -> np.ndarray:
    """Apply Q (product of reflectors) to the n x k matrix `b`, padded to m rows."""
    out = np.zeros((m, b.shape[1]))
    out[: b.shape[0], :] = b
    for j in range(len(reflectors) - 1, -1, -1):
        v = reflectors[j]
        if v is None:
            continue
        out[j:, :] -= np.outer(2.0 * v, v @ out[j:, :])
    return out


def _round_robin_rounds(k: int):
    """Disjoint column-pair schedule covering all pairs of [0, k) once.

    Uses the circle (tournament) ordering; k is padded to even and pairs
    touching the padding index are dropped.
    """
    kk = k if k % 2 == 0 else k + 1
    others = list(range(1, kk))
    rounds = []
    for r in range(kk - 1):
        line = [0] + others[r:] + others[:r]
        ps, qs = [], []
        for i in range(kk // 2):
            p, q = line[i], line[kk - 1 - i]
            if p >= k or q >= k:
                continue
            ps.append(min(p, q))
            qs.append(max(p, q))
        if ps:
            rounds.append((np.array(ps), np.array(qs)))
    return rounds


def _jacobi_orthogonalize(w: np.ndarray, want_vectors: bool = True):
    """One-sided Jacobi: rotate columns of `w` until mutually orthogonal.

    Returns (w, v) with w's columns orthogonal and v the accumulated
    rotation matrix (identity-shaped); w_in @ v == w holds on exit.
    """
    n = w.shape[1]
    v = np.eye(n) if want_vectors else None
    if n == 1:
        return w, v
    rounds = _round_robin_rounds(n)
    tol_sq = _JACOBI_TOL * _JACOBI_TOL
    for _ in range(_JACOBI_MAX_SWEEPS):
        worst = 0.0
        for ps, qs in rounds:
            p_cols = w[:, ps]
            q_cols = w[:, qs]
            aa = np.einsum("ij,ij->j", p_cols, p_cols)
            bb = np.einsum("ij,ij->j", q_cols, q_cols)
            cc = np.einsum("ij,ij->j", p_cols, q_cols)
            denom = aa * bb
            live = denom > 0.0
            ratio_sq = np.zeros_like(cc)
            np.divide(cc * cc, denom, out=ratio_sq, where=live)
            round_worst = float(ratio_sq.max(initial=0.0))
            worst = max(worst, round_worst)
            mask = ratio_sq > tol_sq
            if not mask.any():
                continue
            pa, pb, pc = aa[mask], bb[mask], cc[mask]
            zeta = (pb - pa) / (2.0 * pc)
            t = np.where(zeta >= 0.0, 1.0, -1.0) / (
                np.abs(zeta) + np.sqrt(1.0 + zeta * zeta)
            )
            cs = 1.0 / np.sqrt(1.0 + t * t)
            sn = cs * t
            pm, qm = ps[mask], qs[mask]
            wp = w[:, pm]
            wq = w[:, qm]
            w[:, pm] = cs * wp - sn * wq
            w[:, qm] = sn * wp + cs * wq
            if want_vectors:
                vp = v[:, pm]
                vq = v[:, qm]
                v[:, pm] = cs * vp - sn * vq
                v[:, qm] = sn * vp + cs * vq
        if worst <= tol_sq:
            break
    return w, v


def svd(a):
    """Thin singular value decomposition A = U @ diag(s) @ Vt.

    Parameters
    ----------
    a : array, shape (m, n)
        Real matrix.

    Returns
    -------
    u : array, shape (m, k) with k = min(m, n)
        Left singular vectors (columns for zero singular values are zero).
    s : array, shape (k,)
        Singular values, descending.
    vt : array, shape (k, n)
        Right singular vectors, transposed.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m < n:
        ut, s, vtt = svd(a.T)
        return vtt.T, s, ut.T
    reflectors, r = _householder_qr(a)
    w, v = _jacobi_orthogonalize(r)
    s = np.sqrt(np.einsum("ij,ij->j", w, w))
    order = np.argsort(-s, kind="stable")
    s = s[order]
    w = w[:, order]
    v = v[:, order]
    u_small = np.zeros_like(w)
    nonzero = s > 0.0
    u_small[:, nonzero] = w[:, nonzero] / s[nonzero]
    u = _apply_q(reflectors, u_small, m)
    return u, s, v.T


def singular_values(a) -> np.ndarray:
    """Singular values of `a`, descending (no vectors accumulated)."""
    a = as_matrix(a)
    if a.shape[0] < a.shape[1]:
        a = a.T
    _, r = _householder_qr(a)
    w, _ = _jacobi_orthogonalize(r, want_vectors=False)
    s = np.sqrt(np.einsum("ij,ij->j", w, w))
    s.sort()
    return s[::-1]


def spectral_norm_sq(m) -> float:
    """Largest eigenvalue of M.T @ M, i.e. sigma_1(M)^2; 0 for a zero matrix."""
    a = as_matrix(m)
    if not a.any():
        return 0.0
    if a.shape[0] == 1 or a.shape[1] == 1:
        return float(np.sum(a * a))
    s = singular_values(a)
    return float(s[0] ** 2)


def spectral_info(a, rank_tol: float = DEFAULT_RANK_TOL) -> SpectralInfo:
    """Spectral summary of `a` via full decomposition.

    Rank counts singular values above rank_tol * sigma_max; sigma_min_pos
    is the smallest retained singular value.
    """
    a = as_matrix(a, "A")
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    if not a.any():
        raise ZeroMatrixError("zero matrix has no spectral info")
    s = singular_values(a)
    sigma_max = float(s[0])
    rank = int(np.sum(s > rank_tol * sigma_max))
    sigma_min_pos = float(s[rank - 1])
    return SpectralInfo(
        sigma_max=sigma_max,
        sigma_min_pos=sigma_min_pos,
        rank=rank,
        frob_sq=float(np.sum(s * s)),
        cond=sigma_max / sigma_min_pos,
    )


def _truncated_svd(a, rank_tol: float):
    u, s, vt = svd(a)
    if s[0] == 0.0:
        raise ZeroMatrixError("zero matrix has no pseudoinverse")
    keep = s > rank_tol * s[0]
    return u[:, keep], s[keep], vt[keep, :]


def pseudoinverse(a, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse via truncated SVD."""
    u, s, vt = _truncated_svd(as_matrix(a, "A"), rank_tol)
    return (vt.T / s) @ u.T


def pinv_solve(
    a,
    b,
    rank_tol: float = DEFAULT_RANK_TOL,
    x0=None,
    consistency_tol: float = DEFAULT_CONSISTENCY_TOL,
) -> OracleSolution:
    """Minimum-norm least-squares solve, independent of the iterative solver.

    Parameters
    ----------
    a : array, shape (m, n)
        Nonzero coefficient matrix.
    b : array, shape (m,)
        Right-hand side.
    rank_tol : float
        Relative singular-value truncation threshold.
    x0 : array, shape (n,), optional
        Initial guess to project onto the solution set. Defaults to zero,
        in which case x0_star equals x_pinv.
    consistency_tol : float
        Residual threshold (relative to max(1, ||b||)) below which the
        system is declared consistent.

    Returns
    -------
    OracleSolution
    """
    a = as_matrix(a, "A")
    m, n = a.shape
    b = as_vector(b, m, "b")
    u, s, vt = _truncated_svd(a, rank_tol)
    x_pinv = vt.T @ ((u.T @ b) / s)
    if x0 is None:
        x0_star = x_pinv.copy()
    else:
        x0 = as_vector(x0, n, "x0")
        # (I - A^+ A) x0 = x0 - V_r V_r^T x0
        x0_star = x0 - vt.T @ (vt @ x0) + x_pinv
    residual = float(np.linalg.norm(a @ x_pinv - b))
    consistent = residual <= consistency_tol * max(1.0, float(np.linalg.norm(b)))
    return OracleSolution(x_pinv=x_pinv, x0_star=x0_star, consistent=consistent)
