"""Matrix Market ingestion and CSV emission for traces and result tables.

Supported Matrix Market headers: object `matrix`, format `coordinate` or
`array`, field `real`, `integer` or `pattern` (pattern only with
coordinate), symmetry `general` or `symmetric`. Everything else is
rejected by name. Parsed matrices are densified; inputs beyond the
densification cap are refused.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix

DENSIFICATION_CAP = 10_000_000

_FORMATS = ("coordinate", "array")
_FIELDS = ("real", "integer", "pattern")
_SYMMETRIES = ("general", "symmetric")


class MatrixMarketError(ValueError):
    """Malformed Matrix Market content; messages carry a 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class CapacityError(ValueError):
    """Matrix too large to densify."""


@dataclass(frozen=True)
class MatrixMarketHeader:
    object: str
    format: str
    field: str
    symmetry: str


def parse_header(banner: str, line_no: int = 1) -> MatrixMarketHeader:
    """Validate the %%MatrixMarket banner line (case-insensitive)."""
    parts = banner.strip().split()
    if len(parts) != 5 or parts[0] != "%%MatrixMarket":
        raise MatrixMarketError(line_no, "banner must read '%%MatrixMarket matrix <format> <field> <symmetry>'")
    obj, fmt, field, symmetry = (p.lower() for p in parts[1:])
    if obj != "matrix":
        raise MatrixMarketError(line_no, f"unsupported object {obj!r} (only 'matrix')")
    if fmt not in _FORMATS:
        raise MatrixMarketError(line_no, f"unsupported format {fmt!r} (only {_FORMATS})")
    if field not in _FIELDS:
        raise MatrixMarketError(line_no, f"unsupported field {field!r} (only {_FIELDS})")
    if symmetry not in _SYMMETRIES:
        raise MatrixMarketError(line_no, f"unsupported symmetry {symmetry!r} (only {_SYMMETRIES})")
    if fmt == "array" and field == "pattern":
        raise MatrixMarketError(line_no, "pattern field is not valid with array format")
    return MatrixMarketHeader(object=obj, format=fmt, field=field, symmetry=symmetry)


def _data_lines(lines):
    """Yield (line_no, text) for non-comment, non-blank lines after the banner."""
    for no, raw in enumerate(lines, start=2):
        text = raw.strip()
        if not text or text.startswith("%"):
            continue
        yield no, text


def _parse_size(text: str, line_no: int, expect: int) -> list[int]:
    parts = text.split()
    if len(parts) != expect:
        raise MatrixMarketError(line_no, f"size line must have {expect} integers")
    try:
        sizes = [int(p) for p in parts]
    except ValueError:
        raise MatrixMarketError(line_no, "size line must contain integers") from None
    if any(v < 0 for v in sizes) or sizes[0] == 0 or sizes[1] == 0:
        raise MatrixMarketError(line_no, "dimensions must be positive")
    return sizes


def read_matrix_market(path) -> np.ndarray:
    """Read a Matrix Market file into a dense array.

    Coordinate entries are 1-indexed; duplicates are summed; symmetric
    storage is expanded to both triangles; pattern entries become 1.0.
    Array data is laid out column-major per the format definition.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if not lines:
        raise MatrixMarketError(1, "empty file")
    header = parse_header(lines[0], 1)
    body = _data_lines(lines[1:])

    try:
        size_no, size_text = next(body)
    except StopIteration:
        raise MatrixMarketError(len(lines), "missing size line") from None

    if header.format == "coordinate":
        m, n, nnz = _parse_size(size_text, size_no, 3)
    else:
        m, n = _parse_size(size_text, size_no, 2)
        nnz = None
    if m * n > DENSIFICATION_CAP:
        raise CapacityError(
            f"{m}x{n} exceeds the densification cap of {DENSIFICATION_CAP} entries"
        )
    if header.symmetry == "symmetric" and m != n:
        raise MatrixMarketError(size_no, "symmetric matrices must be square")

    a = np.zeros((m, n))
    if header.format == "coordinate":
        want_value = header.field != "pattern"
        count = 0
        for no, text in body:
            parts = text.split()
            if len(parts) != (3 if want_value else 2):
                raise MatrixMarketError(no, "malformed coordinate entry")
            try:
                i = int(parts[0]) - 1
                j = int(parts[1]) - 1
                v = float(parts[2]) if want_value else 1.0
            except ValueError:
                raise MatrixMarketError(no, "malformed coordinate entry") from None
            if not (0 <= i < m and 0 <= j < n):
                raise MatrixMarketError(no, f"entry ({i + 1}, {j + 1}) outside {m}x{n}")
            if header.symmetry == "symmetric" and i < j:
                raise MatrixMarketError(no, "symmetric storage must be lower-triangular")
            a[i, j] += v
            if header.symmetry == "symmetric" and i != j:
                a[j, i] += v
            count += 1
        if count != nnz:
            raise MatrixMarketError(len(lines), f"expected {nnz} entries, found {count}")
    else:
        values = []
        for no, text in body:
            for tok in text.split():
                try:
                    values.append(float(tok))
                except ValueError:
                    raise MatrixMarketError(no, f"malformed array value {tok!r}") from None
        if header.symmetry == "symmetric":
            expected = m * (m + 1) // 2
            if len(values) != expected:
                raise MatrixMarketError(
                    len(lines), f"expected {expected} lower-triangle values, found {len(values)}"
                )
            pos = 0
            for j in range(n):
                for i in range(j, m):
                    a[i, j] = values[pos]
                    a[j, i] = values[pos]
                    pos += 1
        else:
            if len(values) != m * n:
                raise MatrixMarketError(
                    len(lines), f"expected {m * n} values, found {len(values)}"
                )
            a = np.asarray(values).reshape((n, m)).T.copy()
    if not np.all(np.isfinite(a)):
        raise MatrixMarketError(len(lines), "file contains non-finite values")
    return a


def write_matrix_market(a, path, fmt: str = "coordinate") -> None:
    """Write a dense array as real/general Matrix Market (coordinate or array)."""
    a = as_matrix(a)
    m, n = a.shape
    if fmt not in _FORMATS:
        raise ValueError(f"unsupported format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"%%MatrixMarket matrix {fmt} real general\n")
        if fmt == "coordinate":
            rows, cols = np.nonzero(a)
            fh.write(f"{m} {n} {rows.size}\n")
            for i, j in zip(rows, cols):
                fh.write(f"{i + 1} {j + 1} {a[i, j]:.17g}\n")
        else:
            fh.write(f"{m} {n}\n")
            for j in range(n):
                for i in range(m):
                    fh.write(f"{a[i, j]:.17g}\n")


def write_history_csv(trace, path) -> None:
    """Write a solve trace's sampled history as `k,error_norm,residual_norm`.

    Iterations with no recorded error (no oracle) are written as nan.
    """
    errors = dict(trace.error_history)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "error_norm", "residual_norm"])
        for k, res in trace.residual_history:
            err = errors.get(k, math.nan)
            writer.writerow([k, f"{err:.17g}", f"{res:.17g}"])


def read_history_csv(path) -> list[tuple[int, float, float]]:
    """Parse a history CSV back into (k, error_norm, residual_norm) tuples."""
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["k", "error_norm", "residual_norm"]:
            raise ValueError(f"unexpected history header {header!r} in {path}")
        for row in reader:
            out.append((int(row[0]), float(row[1]), float(row[2])))
    return out


RESULTS_FIELDS = (
    "matrix", "m", "n", "method", "alpha", "ell", "tau",
    "iter_mean", "cpu_mean", "speedup",
)


def write_results_csv(results, path) -> None:
    """Write experiment results; each result supplies the RESULTS_FIELDS attributes."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULTS_FIELDS)
        for res in results:
            writer.writerow([
                res.matrix,
                res.m,
                res.n,
                res.method,
                f"{res.alpha:.17g}",
                res.ell,
                res.tau,
                f"{res.iter_mean:.17g}",
                f"{res.cpu_mean:.17g}",
                f"{res.speedup:.17g}",
            ])


def read_results_csv(path) -> list[dict]:
    """Parse a results CSV back into dictionaries with typed values."""
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RESULTS_FIELDS:
            raise ValueError(f"unexpected results header in {path}")
        for row in reader:
            out.append({
                "matrix": row["matrix"],
                "m": int(row["m"]),
                "n": int(row["n"]),
                "method": row["method"],
                "alpha": float(row["alpha"]),
                "ell": int(row["ell"]),
                "tau": int(row["tau"]),
                "iter_mean": float(row["iter_mean"]),
                "cpu_mean": float(row["cpu_mean"]),
                "speedup": float(row["speedup"]),
            })
    return out
