"""Closed-form convergence rates and admissible step-size intervals.

All quantities are exact functions of the spectrum (sigma_1, sigma_r,
||A||_F^2), the column-block count t, and the partition constants beta
and rho. Rates are per-iteration contraction factors of the respective
expected quantity; each is < 1 exactly when alpha lies strictly inside
its admissible interval.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import SpectralInfo


@dataclass(frozen=True)
class AlphaIntervals:
    """Open admissible step-size intervals (0, upper) for each bound."""

    expected: tuple[float, float]
    error_full_rank: tuple[float, float]
    residual_t_eq_n: tuple[float, float]
    residual_t_lt_n: tuple[float, float]


@dataclass(frozen=True)
class TheoryReport:
    """All rates and intervals for one (matrix, partition, alpha) triple.

    Rate fields are None when their structural hypothesis does not apply
    (full column rank for the error rate, t == 1 for the rank-deficient
    error rate, t == n vs t < n for the residual branches). A rate whose
    alpha lies outside its interval is still computed; the corresponding
    alpha_ok_* flag records the violation.
    """

    alpha: float
    t: int
    n: int
    beta: float
    rho: float
    info: SpectralInfo
    expected_iterate_rate: float
    error_rate_thm3: float | None
    error_rate_rankdef_t1: float | None
    residual_rate_teq_n: float | None
    residual_rate_tlt_n: float | None
    alpha_interval_expected: tuple[float, float]
    alpha_interval_thm3: tuple[float, float]
    alpha_interval_thm4_teq_n: tuple[float, float]
    alpha_interval_thm4_tlt_n: tuple[float, float]
    alpha_ok_expected: bool
    alpha_ok_thm3: bool
    alpha_ok_thm4: bool
    full_column_rank: bool


def expected_norm_rate(info: SpectralInfo, alpha: float) -> float:
    """Contraction factor of the expected-iterate recursion.

    max over the nonzero singular values of |1 - alpha sigma_i^2 / ||A||_F^2|;
    the maximum of this piecewise-affine function of sigma^2 is attained at
    sigma_1 or sigma_r, so only the extremes are needed.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    hi = abs(1.0 - alpha * info.sigma_max**2 / info.frob_sq)
    lo = abs(1.0 - alpha * info.sigma_min_pos**2 / info.frob_sq)
    return max(hi, lo)


def error_decay_rate(info: SpectralInfo, alpha: float, t: int, beta: float, n: int) -> float:
    """Per-step factor bounding E||x^k - x_star||^2 for full column rank systems.

    Returns 1 - (2 alpha - t beta alpha^2) sigma_n^2 / ||A||_F^2. Requires
    rank == n (sigma_n positive); alpha outside (0, 2/(t beta)) yields a
    factor >= 1 and is the caller's concern.
    """
    if info.rank < n:
        raise ValueError("not applicable: error decay rate requires full column rank")
    return 1.0 - (2.0 * alpha - t * beta * alpha**2) * info.sigma_min_pos**2 / info.frob_sq


def error_decay_rate_rankdeficient_t1(info: SpectralInfo, alpha: float, beta: float) -> float:
    """Per-step factor bounding E||x^k - x0_star||^2 when t = 1 (any rank)."""
    return 1.0 - (2.0 * alpha - beta * alpha**2) * info.sigma_min_pos**2 / info.frob_sq


def residual_decay_rate(
    info: SpectralInfo, alpha: float, t: int, n: int, beta: float, rho: float
) -> float:
    """Per-step factor bounding E||A x^k - b||^2 for consistent systems.

    t == n branch: 1 + beta alpha^2 - 2 alpha sigma_r^2 / ||A||_F^2.
    t <  n branch: 1 - (2 alpha sigma_r^2 - t rho beta alpha^2) / ||A||_F^2.
    """
    sr_sq = info.sigma_min_pos**2
    if t == n:
        return 1.0 + beta * alpha**2 - 2.0 * alpha * sr_sq / info.frob_sq
    return 1.0 - (2.0 * alpha * sr_sq - t * rho * beta * alpha**2) / info.frob_sq


def admissible_intervals(info: SpectralInfo, t: int, beta: float, rho: float) -> AlphaIntervals:
    """The four open step-size intervals guaranteeing each bound's decay."""
    if beta <= 0 or rho <= 0 or t < 1:
        raise ValueError("t, beta, rho must be positive")
    sr_sq = info.sigma_min_pos**2
    return AlphaIntervals(
        expected=(0.0, 2.0 * info.frob_sq / info.sigma_max**2),
        error_full_rank=(0.0, 2.0 / (t * beta)),
        residual_t_eq_n=(0.0, 2.0 * sr_sq / (beta * info.frob_sq)),
        residual_t_lt_n=(0.0, 2.0 * sr_sq / (t * rho * beta)),
    )


def _inside(alpha: float, interval: tuple[float, float]) -> bool:
    return interval[0] < alpha < interval[1]


def theory_report(
    info: SpectralInfo,
    alpha: float,
    t: int,
    n: int,
    beta: float,
    rho: float,
) -> TheoryReport:
    """Assemble every rate and interval, flagging hypothesis violations."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    intervals = admissible_intervals(info, t, beta, rho)
    full_rank = info.rank >= n
    rate_thm3 = error_decay_rate(info, alpha, t, beta, n) if full_rank else None
    rate_rankdef = error_decay_rate_rankdeficient_t1(info, alpha, beta) if t == 1 else None
    rate_res = residual_decay_rate(info, alpha, t, n, beta, rho)
    return TheoryReport(
        alpha=alpha,
        t=t,
        n=n,
        beta=beta,
        rho=rho,
        info=info,
        expected_iterate_rate=expected_norm_rate(info, alpha),
        error_rate_thm3=rate_thm3,
        error_rate_rankdef_t1=rate_rankdef,
        residual_rate_teq_n=rate_res if t == n else None,
        residual_rate_tlt_n=rate_res if t < n else None,
        alpha_interval_expected=intervals.expected,
        alpha_interval_thm3=intervals.error_full_rank,
        alpha_interval_thm4_teq_n=intervals.residual_t_eq_n,
        alpha_interval_thm4_tlt_n=intervals.residual_t_lt_n,
        alpha_ok_expected=_inside(alpha, intervals.expected),
        alpha_ok_thm3=_inside(alpha, intervals.error_full_rank),
        alpha_ok_thm4=_inside(
            alpha, intervals.residual_t_eq_n if t == n else intervals.residual_t_lt_n
        ),
        full_column_rank=full_rank,
    )
