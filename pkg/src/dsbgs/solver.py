"""Doubly stochastic block Gauss-Seidel iteration and solve loop.

Each step samples a (row block, column block) pair with probability
proportional to the block's squared Frobenius norm and applies

    x <- x - alpha * I_J (A_IJ)^T I_I^T (A x - b) / ||A_IJ||_F^2

touching x only on the sampled column block. The residual r = A x - b is
maintained incrementally at cost O(|I||J| + m|J|) per step instead of
being recomputed, with a periodic full refresh to bound drift.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .linalg import OracleSolution, as_matrix, as_vector, frobenius_norm_sq
from .partition import (
    BlockDistribution,
    BlockPartition,
    PartitionConstants,
    build_distribution,
    compute_constants,
    sample_block,
    submatrix,
)

STOP_ERROR_TO_PINV = "error_to_pinv"
STOP_RESIDUAL_NORM = "residual_norm"
STOP_ITERATION_CAP = "iteration_cap"
_STOP_RULES = (STOP_ERROR_TO_PINV, STOP_RESIDUAL_NORM, STOP_ITERATION_CAP)

# Full residual recompute cadence; bounds incremental drift.
_REFRESH_EVERY = 10_000


@dataclass(frozen=True)
class LinearSystem:
    """A linear system A x = b with a nonzero m x n coefficient matrix."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.a, "A")
        b = as_vector(self.b, a.shape[0], "b")
        if not a.any():
            raise ValueError("coefficient matrix must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape


@dataclass(frozen=True)
class SolverConfig:
    """Step size, seed, iteration cap, and stopping rule for a solve run.

    alpha=None selects the default step size 1.0, clamped into the
    sufficient interval (0, 2/(t*beta)) when 1.0 falls outside it.
    """

    alpha: float | None = None
    seed: int = 0
    max_iters: int = 100_000
    stop_rule: str = STOP_ERROR_TO_PINV
    tol: float = 1e-5
    history_stride: int = 10

    def __post_init__(self):
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.stop_rule not in _STOP_RULES:
            raise ValueError(f"unknown stop rule {self.stop_rule!r}")
        if self.history_stride < 1:
            raise ValueError("history_stride must be at least 1")


@dataclass
class IterateState:
    """Mutable iterate: current x, cached residual r = A x - b, step count k."""

    x: np.ndarray
    r: np.ndarray
    k: int = 0


@dataclass
class SolveTrace:
    """Outcome of a solve run with sampled histories.

    error_history holds (k, ||x^k - x_pinv||); it stays empty when no
    oracle was supplied. residual_history holds (k, ||A x^k - b||).
    """

    iterations: int
    converged: bool
    error_history: list = field(default_factory=list)
    residual_history: list = field(default_factory=list)
    wall_time: float = 0.0
    final_x: np.ndarray | None = None


class Preset(NamedTuple):
    s: int
    t: int
    alpha_note: str


def preset(kind: str, m: int, n: int) -> Preset:
    """Block counts (s, t) recovering the classical special cases.

    landweber -> (1, 1); rk -> (m, 1); rgs -> (1, n); dsgs -> (m, n).
    The note records the literature step sizes the bounds specialize at.
    """
    kinds = {
        "landweber": Preset(1, 1, "no canonical step size; any alpha in (0, 2||A||_F^2/sigma_1^2)"),
        "rk": Preset(m, 1, "alpha=1 recovers the classical randomized Kaczmarz bound"),
        "rgs": Preset(1, n, "alpha=sigma_r^2/||A||_F^2 recovers the classical residual bound"),
        "dsgs": Preset(m, n, "alpha=1/n for the error bound; alpha=sigma_r^2/||A||_F^2 for the residual bound"),
    }
    if kind not in kinds:
        raise ValueError(f"unknown preset {kind!r} (choose from {sorted(kinds)})")
    return kinds[kind]


def objective(sys: LinearSystem, x) -> float:
    """f(x) = ||b - A x||^2 / (2 ||A||_F^2)."""
    x = as_vector(x, sys.a.shape[1], "x")
    r = sys.a @ x - sys.b
    return float(r @ r) / (2.0 * frobenius_norm_sq(sys.a))


def gradient(sys: LinearSystem, x) -> np.ndarray:
    """grad f(x) = A^T (A x - b) / ||A||_F^2."""
    x = as_vector(x, sys.a.shape[1], "x")
    return sys.a.T @ (sys.a @ x - sys.b) / frobenius_norm_sq(sys.a)


def expected_iterate_recursion(sys: LinearSystem, x0, alpha: float, k: int) -> np.ndarray:
    """Exact expected iterate E[x^k], computed deterministically.

    One block step has conditional mean x - alpha * grad f(x), so the mean
    iterate follows the full-gradient recursion with step alpha.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    x = as_vector(x0, sys.a.shape[1], "x0").copy()
    fro = frobenius_norm_sq(sys.a)
    for _ in range(k):
        x -= alpha * (sys.a.T @ (sys.a @ x - sys.b)) / fro
    return x


def dsbgs_step(
    state: IterateState,
    sys: LinearSystem,
    part: BlockPartition,
    block: tuple[int, int],
    alpha: float,
) -> IterateState:
    """Apply one block update in place and return the state.

    The update direction is supported on the sampled column block J:
    delta_J = -alpha (A_IJ)^T r_I / ||A_IJ||_F^2; the cached residual is
    advanced by A_{:,J} delta_J.
    """
    i, j = block
    sub = submatrix(sys.a, part, i, j)
    fro = float(np.einsum("ij,ij->", sub, sub))
    if fro == 0.0:
        raise ValueError(f"block ({i}, {j}) is all zeros and cannot be stepped")
    rsel = part.row_selector(i)
    csel = part.col_selector(j)
    delta = sub.T @ state.r[rsel]
    delta *= -alpha / fro
    state.x[csel] += delta
    state.r += sys.a[:, csel] @ delta
    state.k += 1
    return state


def _resolve_alpha(alpha: float | None, t: int, beta: float) -> float:
    bound = 2.0 / (t * beta)
    if alpha is None:
        # default 1.0, clamped inside the sufficient interval
        return 1.0 if 1.0 < bound else 1.0 / (t * beta)
    if alpha >= bound:
        warnings.warn(
            f"alpha={alpha:g} exceeds the Theorem 3 sufficient bound 2/(t*beta)={bound:g}; "
            "convergence is no longer guaranteed (though often still observed)",
            stacklevel=3,
        )
    return alpha


def solve(
    sys: LinearSystem,
    part: BlockPartition,
    cfg: SolverConfig,
    oracle: OracleSolution | None = None,
    *,
    x0=None,
    distribution: BlockDistribution | None = None,
    constants: PartitionConstants | None = None,
) -> SolveTrace:
    """Run the block iteration until the stopping rule fires or max_iters.

    Parameters
    ----------
    sys : LinearSystem
    part : BlockPartition
        Must conform to the system's dimensions.
    cfg : SolverConfig
    oracle : OracleSolution, optional
        Required for the error_to_pinv stop rule; enables error history.
    x0 : array, optional
        Initial guess; defaults to the zero vector.
    distribution, constants : optional
        Precomputed block distribution / constants. When omitted they are
        built here (the distribution inside the timed region, since it is
        part of the method's own setup cost).

    Returns
    -------
    SolveTrace
    """
    m, n = sys.shape
    if part.nrows != m or part.ncols != n:
        raise ValueError("partition does not conform to the system dimensions")
    if cfg.stop_rule == STOP_ERROR_TO_PINV and oracle is None:
        raise ValueError("error_to_pinv stopping requires an oracle solution")

    if constants is None:
        constants = compute_constants(sys.a, part)
    alpha = _resolve_alpha(cfg.alpha, part.t, constants.beta)

    x = np.zeros(n) if x0 is None else as_vector(x0, n, "x0").copy()
    target = oracle.x_pinv if oracle is not None else None
    tol_sq = cfg.tol * cfg.tol

    t_start = time.perf_counter()
    if distribution is None:
        distribution = build_distribution(sys.a, part)
    rng = np.random.default_rng(cfg.seed)
    state = IterateState(x=x, r=sys.a @ x - sys.b)

    error_history: list[tuple[int, float]] = []
    residual_history: list[tuple[int, float]] = []

    def record():
        if target is not None:
            d = state.x - target
            error_history.append((state.k, math.sqrt(float(d @ d))))
        residual_history.append((state.k, math.sqrt(float(state.r @ state.r))))

    def stopped() -> bool:
        if cfg.stop_rule == STOP_ERROR_TO_PINV:
            d = state.x - target
            return float(d @ d) <= tol_sq
        if cfg.stop_rule == STOP_RESIDUAL_NORM:
            return float(state.r @ state.r) <= tol_sq
        return False

    record()
    converged = stopped()
    while not converged and state.k < cfg.max_iters:
        block = sample_block(distribution, rng)
        dsbgs_step(state, sys, part, block, alpha)
        if state.k % _REFRESH_EVERY == 0:
            state.r = sys.a @ state.x - sys.b
        converged = stopped()
        if converged or state.k % cfg.history_stride == 0:
            record()
    wall = time.perf_counter() - t_start

    if not converged and residual_history[-1][0] != state.k:
        record()
    if cfg.stop_rule == STOP_ITERATION_CAP:
        converged = state.k >= cfg.max_iters or converged

    return SolveTrace(
        iterations=state.k,
        converged=converged,
        error_history=error_history,
        residual_history=residual_history,
        wall_time=wall,
        final_x=state.x,
    )
