"""Synthetic consistent-system generators.

Type I builds A = U D V^T with orthonormal-column factors and uniform
(1, kappa) diagonal entries, giving exact rank r and condition number at
most kappa. Type II is a plain standard-normal matrix. Both plant a
standard-normal solution x_true and set b = A x_true, so the generated
system is consistent by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .solver import LinearSystem


@dataclass(frozen=True)
class GeneratedProblem:
    """A generated system together with its planted solution and provenance."""

    system: LinearSystem
    x_true: np.ndarray
    kind: str
    seed: int


def normal_samples(count: int, seed: int) -> np.ndarray:
    """`count` i.i.d. standard-normal draws from a seeded PCG64 stream."""
    if count < 1:
        raise ValueError("count must be at least 1")
    return np.random.default_rng(seed).standard_normal(count)


def _orthonormal_columns(rng: np.random.Generator, dim: int, r: int) -> np.ndarray:
    """Orthonormalize the columns of a dim x r standard-normal matrix.

    Modified Gram-Schmidt with one reorthogonalization pass; a
    standard-normal matrix has full column rank with probability one, so
    no degenerate pivots arise.
    """
    g = rng.standard_normal((dim, r))
    q = np.empty_like(g)
    for j in range(r):
        v = g[:, j].copy()
        for _ in range(2):
            if j > 0:
                v -= q[:, :j] @ (q[:, :j].T @ v)
        norm = np.sqrt(v @ v)
        if norm == 0.0:
            raise ValueError("degenerate column during orthonormalization")
        q[:, j] = v / norm
    return q


def gen_type1(m: int, n: int, r: int, kappa: float, seed: int) -> GeneratedProblem:
    """Rank-r system A = U D V^T with condition number bounded by kappa.

    U (m x r) and V (n x r) have orthonormal columns obtained from
    standard-normal matrices; D's diagonal is i.i.d. uniform on (1, kappa),
    unsorted.
    """
    if r > min(m, n):
        raise ValueError(f"rank r={r} exceeds min(m, n)={min(m, n)}")
    if r < 1:
        raise ValueError("rank r must be at least 1")
    if kappa <= 1:
        raise ValueError("kappa must exceed 1")
    rng = np.random.default_rng(seed)
    u = _orthonormal_columns(rng, m, r)
    v = _orthonormal_columns(rng, n, r)
    d = 1.0 + (kappa - 1.0) * rng.random(r)
    a = (u * d) @ v.T
    x_true = rng.standard_normal(n)
    return GeneratedProblem(
        system=LinearSystem(a=a, b=a @ x_true),
        x_true=x_true,
        kind=f"type1(m={m},n={n},r={r},kappa={kappa:g})",
        seed=seed,
    )


def gen_type2(m: int, n: int, seed: int) -> GeneratedProblem:
    """Standard-normal m x n system; full rank with probability one."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be at least 1")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((m, n))
    x_true = rng.standard_normal(n)
    return GeneratedProblem(
        system=LinearSystem(a=a, b=a @ x_true),
        x_true=x_true,
        kind=f"type2(m={m},n={n})",
        seed=seed,
    )
