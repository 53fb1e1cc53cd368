"""Row/column partitions, block sampling distribution, and the beta/rho constants."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix, frobenius_norm_sq, spectral_norm_sq


def _validate_blocks(blocks, dim: int, what: str):
    seen = np.zeros(dim, dtype=bool)
    total = 0
    for k, idx in enumerate(blocks):
        if idx.size == 0:
            raise ValueError(f"{what} block {k} is empty")
        if np.any(idx < 0) or np.any(idx >= dim):
            raise ValueError(f"{what} block {k} has indices outside [0, {dim})")
        if idx.size > 1 and np.any(np.diff(idx) <= 0):
            raise ValueError(f"{what} block {k} indices must be strictly increasing")
        if seen[idx].any():
            raise ValueError(f"{what} blocks are not pairwise disjoint")
        seen[idx] = True
        total += idx.size
    if total != dim or not seen.all():
        raise ValueError(f"{what} blocks do not cover all {dim} indices")


def _as_selector(idx: np.ndarray):
    """Slice view for contiguous index runs, else the index array itself."""
    if idx.size == 1 or np.all(np.diff(idx) == 1):
        return slice(int(idx[0]), int(idx[-1]) + 1)
    return idx


@dataclass(frozen=True)
class BlockPartition:
    """Disjoint covering partitions of the row indices [0, m) and column indices [0, n).

    Blocks are arrays of strictly increasing 0-based indices. s and t are
    the row- and column-block counts.
    """

    row_blocks: tuple
    col_blocks: tuple
    nrows: int = field(init=False)
    ncols: int = field(init=False)
    _row_sel: tuple = field(init=False, repr=False)
    _col_sel: tuple = field(init=False, repr=False)

    def __post_init__(self):
        rows = tuple(np.asarray(b, dtype=np.intp) for b in self.row_blocks)
        cols = tuple(np.asarray(b, dtype=np.intp) for b in self.col_blocks)
        nrows = int(sum(b.size for b in rows))
        ncols = int(sum(b.size for b in cols))
        _validate_blocks(rows, nrows, "row")
        _validate_blocks(cols, ncols, "column")
        object.__setattr__(self, "row_blocks", rows)
        object.__setattr__(self, "col_blocks", cols)
        object.__setattr__(self, "nrows", nrows)
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "_row_sel", tuple(_as_selector(b) for b in rows))
        object.__setattr__(self, "_col_sel", tuple(_as_selector(b) for b in cols))

    @property
    def s(self) -> int:
        return len(self.row_blocks)

    @property
    def t(self) -> int:
        return len(self.col_blocks)

    def row_selector(self, i: int):
        """Selector for row block i; a slice when the block is contiguous."""
        return self._row_sel[i]

    def col_selector(self, j: int):
        return self._col_sel[j]


def submatrix(a: np.ndarray, part: BlockPartition, i: int, j: int) -> np.ndarray:
    """The block A_{I_i, J_j}; a view when both blocks are contiguous."""
    rsel = part.row_selector(i)
    csel = part.col_selector(j)
    if isinstance(rsel, slice) or isinstance(csel, slice):
        return a[rsel, csel]
    return a[np.ix_(rsel, csel)]


def uniform_partition(dim: int, block_size: int) -> list[np.ndarray]:
    """Contiguous blocks of `block_size` indices; the last block keeps the remainder.

    Produces ceil(dim / block_size) blocks covering [0, dim).
    """
    if block_size < 1 or block_size > dim:
        raise ValueError(f"block_size must be in [1, {dim}], got {block_size}")
    nblocks = -(-dim // block_size)
    blocks = []
    for k in range(nblocks):
        lo = k * block_size
        hi = dim if k == nblocks - 1 else (k + 1) * block_size
        blocks.append(np.arange(lo, hi, dtype=np.intp))
    return blocks


def make_partition(m: int, n: int, ell: int, tau: int) -> BlockPartition:
    """Uniform contiguous partition with row blocks of size ell, column blocks of size tau."""
    return BlockPartition(
        row_blocks=tuple(uniform_partition(m, ell)),
        col_blocks=tuple(uniform_partition(n, tau)),
    )


@dataclass(frozen=True)
class BlockDistribution:
    """Frobenius-weighted distribution over the s x t block grid.

    frob_table[i, j] holds ||A_{I_i, J_j}||_F^2, total their sum, and
    cumulative the flattened running sum used for inverse-CDF sampling.
    """

    frob_table: np.ndarray
    total: float
    cumulative: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return self.frob_table / self.total


def build_distribution(a, part: BlockPartition) -> BlockDistribution:
    """Block squared-Frobenius table and sampling CDF for matrix `a`."""
    a = as_matrix(a, "A")
    m, n = a.shape
    if part.nrows != m or part.ncols != n:
        raise ValueError(
            f"partition is for {part.nrows}x{part.ncols}, matrix is {m}x{n}"
        )
    sq = a * a
    # sum within column blocks first, then row blocks
    col_sums = np.empty((m, part.t))
    for j in range(part.t):
        col_sums[:, j] = sq[:, part.col_selector(j)].sum(axis=1)
    table = np.empty((part.s, part.t))
    for i in range(part.s):
        table[i, :] = col_sums[part.row_selector(i), :].sum(axis=0)
    total = float(table.sum())
    if total == 0.0:
        raise ValueError("degenerate distribution: matrix is all zeros")
    return BlockDistribution(
        frob_table=table, total=total, cumulative=np.cumsum(table.ravel())
    )


def sample_block(dist: BlockDistribution, rng: np.random.Generator) -> tuple[int, int]:
    """Draw one (row_block, col_block) pair with probability frob_table / total.

    Draws are i.i.d. across calls; `rng` advances deterministically.
    Zero-weight blocks are never selected.
    """
    u = rng.random() * dist.total
    flat = int(np.searchsorted(dist.cumulative, u, side="right"))
    if flat >= dist.cumulative.size:  # u*total rounded up to total
        flat = dist.cumulative.size - 1
    t = dist.frob_table.shape[1]
    return flat // t, flat % t


def sample_blocks(
    dist: BlockDistribution, rng: np.random.Generator, count: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized i.i.d. draw of `count` block pairs; returns (row_idx, col_idx) arrays."""
    u = rng.random(count) * dist.total
    flat = np.searchsorted(dist.cumulative, u, side="right")
    np.minimum(flat, dist.cumulative.size - 1, out=flat)
    t = dist.frob_table.shape[1]
    return flat // t, flat % t


@dataclass(frozen=True)
class PartitionConstants:
    """Partition-dependent constants entering the convergence rates.

    beta is the largest spectral-to-Frobenius squared-norm ratio over the
    selectable (nonzero) blocks; rho the largest squared spectral norm
    over the full-height column blocks.
    """

    beta: float
    rho: float


def compute_constants(a, part: BlockPartition) -> PartitionConstants:
    """Compute beta and rho for matrix `a` under `part`.

    Zero-Frobenius blocks are skipped in beta's max: their selection
    probability is zero, so they never influence an iterate.
    """
    a = as_matrix(a, "A")
    if not a.any():
        raise ValueError("constants undefined for an all-zero matrix")
    beta = 0.0
    for i in range(part.s):
        for j in range(part.t):
            block = submatrix(a, part, i, j)
            fro = frobenius_norm_sq(block)
            if fro == 0.0:
                continue
            beta = max(beta, spectral_norm_sq(block) / fro)
    rho = max(spectral_norm_sq(a[:, part.col_selector(j)]) for j in range(part.t))
    return PartitionConstants(beta=beta, rho=rho)
