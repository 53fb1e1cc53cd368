"""Doubly stochastic block Gauss-Seidel solver, rate analysis, and benchmarks."""

from .linalg import (
    OracleSolution,
    SpectralInfo,
    ZeroMatrixError,
    frobenius_norm_sq,
    matvec,
    matvec_transpose,
    pinv_solve,
    pseudoinverse,
    spectral_info,
    spectral_norm_sq,
    svd,
)
from .partition import (
    BlockDistribution,
    BlockPartition,
    PartitionConstants,
    build_distribution,
    compute_constants,
    make_partition,
    sample_block,
    sample_blocks,
    uniform_partition,
)
from .probgen import GeneratedProblem, gen_type1, gen_type2, normal_samples
from .solver import (
    IterateState,
    LinearSystem,
    SolveTrace,
    SolverConfig,
    dsbgs_step,
    expected_iterate_recursion,
    gradient,
    objective,
    preset,
    solve,
)
from .theory import (
    AlphaIntervals,
    TheoryReport,
    admissible_intervals,
    error_decay_rate,
    error_decay_rate_rankdeficient_t1,
    expected_norm_rate,
    residual_decay_rate,
    theory_report,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaIntervals",
    "BlockDistribution",
    "BlockPartition",
    "GeneratedProblem",
    "IterateState",
    "LinearSystem",
    "OracleSolution",
    "PartitionConstants",
    "SolveTrace",
    "SolverConfig",
    "SpectralInfo",
    "TheoryReport",
    "ZeroMatrixError",
    "admissible_intervals",
    "build_distribution",
    "compute_constants",
    "dsbgs_step",
    "error_decay_rate",
    "error_decay_rate_rankdeficient_t1",
    "expected_iterate_recursion",
    "expected_norm_rate",
    "frobenius_norm_sq",
    "gen_type1",
    "gen_type2",
    "gradient",
    "make_partition",
    "matvec",
    "matvec_transpose",
    "normal_samples",
    "objective",
    "pinv_solve",
    "preset",
    "pseudoinverse",
    "residual_decay_rate",
    "sample_block",
    "sample_blocks",
    "solve",
    "spectral_info",
    "spectral_norm_sq",
    "svd",
    "theory_report",
    "uniform_partition",
]
