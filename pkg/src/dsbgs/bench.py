"""Multi-trial experiment harness comparing solver configurations.

Each trial regenerates the problem (synthetic kinds) or reuses the loaded
matrix (Matrix Market kind), computes the pseudoinverse oracle once, and
runs every method from x0 = 0 with the error-to-pseudoinverse stopping
rule. The first listed method is the speed-up baseline. Iteration counts
are deterministic for a fixed base seed; CPU times are qualitative.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .io import read_matrix_market
from .linalg import pinv_solve, spectral_info
from .partition import compute_constants, make_partition
from .probgen import gen_type1, gen_type2
from .solver import LinearSystem, SolverConfig, solve
from .theory import theory_report

# Offset decorrelating sampler streams from problem-generation streams.
_SAMPLER_SEED_STRIDE = 1_000_003


@dataclass(frozen=True)
class ProblemSpec:
    """Where a trial's linear system comes from.

    kind is one of 'type1' (m, n, rank, kappa), 'type2' (m, n), or
    'matrix_market' (path, optional rhs_path). Synthetic kinds redraw the
    matrix every trial; a Matrix Market matrix is fixed and only the
    sampler stream varies across trials.
    """

    kind: str
    m: int = 0
    n: int = 0
    rank: int = 0
    kappa: float = 0.0
    path: str = ""
    rhs_path: str = ""

    def label(self) -> str:
        if self.kind == "type1":
            return f"type1({self.m}x{self.n},r={self.rank},kappa={self.kappa:g})"
        if self.kind == "type2":
            return f"type2({self.m}x{self.n})"
        return self.path


@dataclass(frozen=True)
class MethodSpec:
    """One solver configuration: label, step size, and block sizes (ell, tau)."""

    label: str
    alpha: float
    ell: int
    tau: int


@dataclass(frozen=True)
class ExperimentSpec:
    problem: ProblemSpec
    methods: tuple
    trials: int = 20
    stop_tol: float = 1e-5
    max_iters: int = 1_000_000
    base_seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.methods:
            raise ValueError("at least one method is required")
        object.__setattr__(self, "methods", tuple(self.methods))


@dataclass(frozen=True)
class TrialRecord:
    iters: int
    seconds: float
    converged: bool


@dataclass
class ExperimentResult:
    """Per-method aggregate over all trials.

    Means are taken over converged trials only; non-converged trials stay
    visible in per_trial and are reported with a warning, never dropped
    silently.
    """

    matrix: str
    m: int
    n: int
    label: str
    alpha: float
    ell: int
    tau: int
    iter_mean: float = math.nan
    cpu_mean: float = math.nan
    speedup_vs_baseline: float = math.nan
    per_trial: list = field(default_factory=list)

    @property
    def method(self) -> str:
        return self.label

    @property
    def speedup(self) -> float:
        return self.speedup_vs_baseline


def timing(fn, *args, **kwargs):
    """Run `fn` and return (result, elapsed_seconds) from a monotonic clock."""
    t0 = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - t0


def rk_method(alpha: float = 1.0, label: str = "RK") -> MethodSpec:
    """The randomized Kaczmarz baseline: single rows, full-width columns."""
    return MethodSpec(label=label, alpha=alpha, ell=1, tau=-1)


def dsbgs_method(alpha: float, ell: int, tau: int, label: str | None = None) -> MethodSpec:
    """A block method; tau=-1 means one full-width column block (tau = n)."""
    if label is None:
        tau_txt = "n" if tau == -1 else str(tau)
        label = f"DSBGS({alpha:g},{ell},{tau_txt})"
    return MethodSpec(label=label, alpha=alpha, ell=ell, tau=tau)


def _realize_problem(spec: ProblemSpec, seed: int) -> LinearSystem:
    if spec.kind == "type1":
        return gen_type1(spec.m, spec.n, spec.rank, spec.kappa, seed).system
    if spec.kind == "type2":
        return gen_type2(spec.m, spec.n, seed).system
    raise ValueError(f"unknown problem kind {spec.kind!r}")


def _load_matrix_market_system(spec: ProblemSpec, seed: int) -> LinearSystem:
    a = read_matrix_market(spec.path)
    if spec.rhs_path:
        b = read_matrix_market(spec.rhs_path)
        if b.shape[1] != 1:
            raise ValueError(f"RHS file {spec.rhs_path} must be a single column")
        return LinearSystem(a=a, b=b[:, 0])
    # consistent RHS synthesized from a planted standard-normal solution
    x_true = np.random.default_rng(seed).standard_normal(a.shape[1])
    return LinearSystem(a=a, b=a @ x_true)


def _effective_tau(tau: int, n: int) -> int:
    return n if tau == -1 else tau


def run_experiment(spec: ExperimentSpec, parallel: bool = False) -> list[ExperimentResult]:
    """Run every method over every trial and aggregate ITER/CPU/speed-up.

    Seed ladder: trial problems use base_seed + trial; sampler streams use
    base_seed + 1000003 * (trial + 1) + method index, which keeps both
    reproducible and uncorrelated with problem generation.
    """
    fixed_system = None
    if spec.problem.kind == "matrix_market":
        fixed_system = _load_matrix_market_system(spec.problem, spec.base_seed)
        m, n = fixed_system.shape
    else:
        m, n = spec.problem.m, spec.problem.n
    for method in spec.methods:
        tau = _effective_tau(method.tau, n)
        if not (1 <= method.ell <= m) or not (1 <= tau <= n):
            raise ValueError(f"method {method.label!r} block sizes exceed {m}x{n}")

    results = [
        ExperimentResult(
            matrix=spec.problem.label(),
            m=m,
            n=n,
            label=meth.label,
            alpha=meth.alpha,
            ell=meth.ell,
            tau=_effective_tau(meth.tau, n),
            per_trial=[None] * spec.trials,
        )
        for meth in spec.methods
    ]

    def run_trial(trial: int):
        if fixed_system is not None:
            system = fixed_system
        else:
            system = _realize_problem(spec.problem, spec.base_seed + trial)
        oracle = pinv_solve(system.a, system.b)
        partitions = {}
        records = []
        for idx, meth in enumerate(spec.methods):
            tau = _effective_tau(meth.tau, system.shape[1])
            key = (meth.ell, tau)
            if key not in partitions:
                part = make_partition(system.shape[0], system.shape[1], meth.ell, tau)
                partitions[key] = (part, compute_constants(system.a, part))
            part, constants = partitions[key]
            cfg = SolverConfig(
                alpha=meth.alpha,
                seed=spec.base_seed + _SAMPLER_SEED_STRIDE * (trial + 1) + idx,
                max_iters=spec.max_iters,
                stop_rule="error_to_pinv",
                tol=spec.stop_tol,
            )
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # step-size advisories are per-run noise here
                trace = solve(system, part, cfg, oracle, constants=constants)
            records.append(TrialRecord(trace.iterations, trace.wall_time, trace.converged))
        return records

    if parallel and spec.trials > 1:
        with ThreadPoolExecutor() as pool:
            all_records = list(pool.map(run_trial, range(spec.trials)))
    else:
        all_records = [run_trial(trial) for trial in range(spec.trials)]

    for trial, records in enumerate(all_records):
        for idx, rec in enumerate(records):
            results[idx].per_trial[trial] = rec

    for res in results:
        good = [rec for rec in res.per_trial if rec.converged]
        skipped = len(res.per_trial) - len(good)
        if skipped:
            warnings.warn(
                f"method {res.label!r}: {skipped} of {len(res.per_trial)} trials did not "
                f"converge within {spec.max_iters} iterations; excluded from means"
            )
        if good:
            res.iter_mean = float(np.mean([rec.iters for rec in good]))
            res.cpu_mean = float(np.mean([rec.seconds for rec in good]))

    baseline_cpu = results[0].cpu_mean
    for res in results:
        res.speedup_vs_baseline = baseline_cpu / res.cpu_mean
    return results


def theory_report_cmd(system: LinearSystem, alpha: float, ell: int, tau: int, out=print):
    """Print the spectral constants and every rate/interval for one setup."""
    m, n = system.shape
    tau = _effective_tau(tau, n)
    part = make_partition(m, n, ell, tau)
    constants = compute_constants(system.a, part)
    info = spectral_info(system.a)
    report = theory_report(info, alpha, part.t, n, constants.beta, constants.rho)

    def fmt_rate(value):
        return "not applicable" if value is None else f"{value:.12g}"

    def fmt_interval(iv):
        return f"(0, {iv[1]:.12g})"

    out(f"matrix: {m} x {n}, rank {info.rank}")
    out(
        f"sigma_1 = {info.sigma_max:.12g}, sigma_r = {info.sigma_min_pos:.12g}, "
        f"||A||_F^2 = {info.frob_sq:.12g}, cond = {info.cond:.12g}"
    )
    out(f"partition: s = {part.s}, t = {part.t} (ell = {ell}, tau = {tau})")
    out(f"beta = {constants.beta:.12g}, rho = {constants.rho:.12g}")
    out(f"alpha = {alpha:g}")
    out(
        f"expected-iterate rate = {report.expected_iterate_rate:.12g}, "
        f"interval {fmt_interval(report.alpha_interval_expected)}, "
        f"alpha inside: {'yes' if report.alpha_ok_expected else 'no'}"
    )
    thm3_note = "" if report.alpha_ok_thm3 else "  [alpha exceeds Theorem 3 sufficient bound]"
    out(
        f"error rate (full column rank) = {fmt_rate(report.error_rate_thm3)}, "
        f"interval {fmt_interval(report.alpha_interval_thm3)}{thm3_note}"
    )
    out(f"error rate (rank-deficient, t=1) = {fmt_rate(report.error_rate_rankdef_t1)}")
    out(
        f"residual rate (t = n) = {fmt_rate(report.residual_rate_teq_n)}, "
        f"interval {fmt_interval(report.alpha_interval_thm4_teq_n)}"
    )
    out(
        f"residual rate (t < n) = {fmt_rate(report.residual_rate_tlt_n)}, "
        f"interval {fmt_interval(report.alpha_interval_thm4_tlt_n)}"
    )
    if not report.alpha_ok_thm4:
        out("note: alpha lies outside the Theorem 4 interval for this branch")
    return report
