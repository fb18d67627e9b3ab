"""Sparse (row-compressed) and dense matrices over GF(q).

Text formats
------------
Sparse coordinate file::

    q m n nnz
    row col value      # nnz lines, 0-indexed, value in 1..q-1, sorted by (row, col)

Dense file::

    q rows cols
    v v v ...          # one matrix row per line
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .gf import Field, FieldMismatchError, get_field

__all__ = [
    "SparseMatrix",
    "DenseMatrix",
    "matvec",
    "add_entrywise",
    "split_rows",
    "vstack",
    "measure_sparsity",
    "read_sparse",
    "write_sparse",
    "read_dense",
    "write_dense",
    "format_sparse",
    "format_dense",
]


def _check_field(a: Field, b: Field) -> None:
    if a != b:
        raise FieldMismatchError(f"GF({a.q}) vs GF({b.q})")


class SparseMatrix:
    """Immutable CSR matrix over a finite field; stored values are never 0."""

    __slots__ = ("field", "shape", "indptr", "indices", "data")

    def __init__(self, field: Field, shape, indptr, indices, data, check: bool = True):
        m, n = int(shape[0]), int(shape[1])
        if m < 0 or n < 0:
            raise ValueError(f"invalid shape {shape}")
        self.field = field
        self.shape = (m, n)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data, dtype=np.int64)
        for arr in (self.indptr, self.indices, self.data):
            arr.flags.writeable = False
        if check:
            self._validate()

    def _validate(self) -> None:
        m, n = self.shape
        if self.indptr.shape != (m + 1,) or self.indptr[0] != 0:
            raise ValueError("indptr must have length rows+1 and start at 0")
        if np.any(np.diff(self.indptr) < 0) or self.indptr[-1] != self.data.size:
            raise ValueError("indptr must be non-decreasing and end at nnz")
        if self.indices.size != self.data.size:
            raise ValueError("indices and data lengths differ")
        if self.data.size:
            if self.indices.min() < 0 or self.indices.max() >= n:
                raise ValueError("column index out of range")
            if np.any(self.data == 0):
                raise ValueError("explicit zeros are not allowed")
            if self.data.min() < 0 or self.data.max() >= self.field.q:
                raise ValueError(f"values outside 1..{self.field.q - 1}")
            # strictly increasing columns within each row
            step = np.diff(self.indices)
            row_starts = self.indptr[1:-1]
            within = np.ones(step.size, dtype=bool)
            within[row_starts[(row_starts > 0) & (row_starts < self.data.size)] - 1] = False
            if np.any(step[within] <= 0):
                raise ValueError("column indices must be strictly increasing within a row")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_dense(cls, dense, field: Field) -> "SparseMatrix":
        arr = field.validate(dense)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        rows, cols = np.nonzero(arr)
        indptr = np.zeros(arr.shape[0] + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=arr.shape[0]), out=indptr[1:])
        return cls(field, arr.shape, indptr, cols, arr[rows, cols], check=False)

    @classmethod
    def from_coo(cls, field: Field, shape, rows, cols, values) -> "SparseMatrix":
        """Build from triples; duplicates are rejected, zero values dropped."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = field.validate(values)
        m, n = shape
        if rows.size and (rows.min() < 0 or rows.max() >= m or cols.min() < 0 or cols.max() >= n):
            raise ValueError("coordinate out of range")
        keep = values != 0
        rows, cols, values = rows[keep], cols[keep], values[keep]
        order = np.lexsort((cols, rows))
        rows, cols, values = rows[order], cols[order], values[order]
        if rows.size > 1:
            dup = (np.diff(rows) == 0) & (np.diff(cols) == 0)
            if np.any(dup):
                raise ValueError("duplicate coordinates")
        indptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=m), out=indptr[1:])
        return cls(field, (m, n), indptr, cols, values)

    @classmethod
    def zeros(cls, field: Field, m: int, n: int) -> "SparseMatrix":
        return cls(field, (m, n), np.zeros(m + 1), np.zeros(0), np.zeros(0), check=False)

    @classmethod
    def identity(cls, field: Field, m: int) -> "SparseMatrix":
        return cls(field, (m, m), np.arange(m + 1), np.arange(m), np.ones(m), check=False)

    # -- views ------------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    @property
    def nnz(self) -> int:
        return int(self.data.size)

    def row_ids(self) -> np.ndarray:
        return np.repeat(np.arange(self.rows, dtype=np.int64), np.diff(self.indptr))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.int64)
        out[self.row_ids(), self.indices] = self.data
        return out

    def neg(self) -> "SparseMatrix":
        return SparseMatrix(self.field, self.shape, self.indptr, self.indices,
                            self.field.neg(self.data), check=False)

    def row_slice(self, start: int, stop: int) -> "SparseMatrix":
        lo, hi = self.indptr[start], self.indptr[stop]
        return SparseMatrix(self.field, (stop - start, self.cols), self.indptr[start:stop + 1] - lo,
                            self.indices[lo:hi], self.data[lo:hi], check=False)

    def pad_rows(self, m: int) -> "SparseMatrix":
        """Append zero rows up to ``m`` rows."""
        if m < self.rows:
            raise ValueError("cannot pad to fewer rows")
        indptr = np.concatenate([self.indptr, np.full(m - self.rows, self.indptr[-1])])
        return SparseMatrix(self.field, (m, self.cols), indptr, self.indices, self.data, check=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.data, other.data))

    __hash__ = None

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        return add_entrywise(self, other)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return add_entrywise(self, other.neg())

    def __neg__(self) -> "SparseMatrix":
        return self.neg()

    def __repr__(self) -> str:
        return f"SparseMatrix(GF({self.field.q}), shape={self.shape}, nnz={self.nnz})"


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    field: Field
    data: np.ndarray

    def __post_init__(self):
        arr = self.field.validate(self.data)
        if arr.ndim != 2:
            raise ValueError("dense matrix must be 2-d")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @classmethod
    def random(cls, field: Field, rows: int, cols: int, rng: np.random.Generator) -> "DenseMatrix":
        return cls(field, field.sample(rng, size=(rows, cols)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.data, other.data)

    __hash__ = None

    def __add__(self, other: "DenseMatrix") -> "DenseMatrix":
        _check_field(self.field, other.field)
        return DenseMatrix(self.field, self.field.add(self.data, other.data))

    def __sub__(self, other: "DenseMatrix") -> "DenseMatrix":
        _check_field(self.field, other.field)
        return DenseMatrix(self.field, self.field.sub(self.data, other.data))


def matvec(A: SparseMatrix, x: DenseMatrix) -> DenseMatrix:
    """Exact product ``A @ x`` over GF(q); work is O(nnz(A) * x.cols)."""
    _check_field(A.field, x.field)
    if A.cols != x.rows:
        raise ValueError(f"dimension mismatch: {A.shape} @ {x.shape}")
    field = A.field
    out = np.zeros((A.rows, x.cols), dtype=np.int64)
    if A.nnz == 0:
        return DenseMatrix(field, out)
    prod = field.mul(A.data[:, None], x.data[A.indices, :])
    counts = np.diff(A.indptr)
    nonempty = np.flatnonzero(counts)
    starts = A.indptr[:-1][nonempty]
    if field.is_binary:
        out[nonempty] = np.bitwise_xor.reduceat(prod, starts, axis=0)
    else:
        out[nonempty] = np.add.reduceat(prod, starts, axis=0) % field.q
    return DenseMatrix(field, out)


def add_entrywise(A: SparseMatrix, B: SparseMatrix) -> SparseMatrix:
    """Entry-wise sum; cancelled entries are not stored."""
    _check_field(A.field, B.field)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    field = A.field
    m, n = A.shape
    keys = np.concatenate([A.row_ids() * n + A.indices, B.row_ids() * n + B.indices])
    vals = np.concatenate([A.data, B.data])
    order = np.argsort(keys, kind="stable")
    keys, vals = keys[order], vals[order]
    uniq, first = np.unique(keys, return_index=True)
    summed = vals[first].copy()
    # each key occurs at most twice (once per operand)
    second = np.flatnonzero(np.diff(keys) == 0) + 1
    if second.size:
        pos = np.searchsorted(uniq, keys[second])
        summed[pos] = field.add(summed[pos], vals[second])
    keep = summed != 0
    uniq, summed = uniq[keep], summed[keep]
    rows = uniq // n if n else uniq
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=m), out=indptr[1:])
    return SparseMatrix(field, A.shape, indptr, uniq % n if n else uniq, summed, check=False)


def padded_rows(m: int, parts: int) -> int:
    """Smallest multiple of ``parts`` that is >= m."""
    return -(-m // parts) * parts


def split_rows(A: SparseMatrix, parts: int) -> list[SparseMatrix]:
    """Split into ``parts`` equal row blocks, zero-padding rows if needed.

    Callers keep ``A.rows`` to drop the padded rows after stacking.
    """
    if parts <= 0:
        raise ValueError("parts must be positive")
    total = padded_rows(A.rows, parts)
    padded = A.pad_rows(total) if total != A.rows else A
    h = total // parts
    return [padded.row_slice(i * h, (i + 1) * h) for i in range(parts)]


def vstack(blocks: list[SparseMatrix], rows: int | None = None) -> SparseMatrix:
    """Stack blocks vertically, optionally truncating to ``rows`` rows."""
    if not blocks:
        raise ValueError("nothing to stack")
    field, n = blocks[0].field, blocks[0].cols
    ptrs, idx, dat, offset = [np.zeros(1, dtype=np.int64)], [], [], 0
    for b in blocks:
        _check_field(field, b.field)
        if b.cols != n:
            raise ValueError("column mismatch")
        ptrs.append(b.indptr[1:] + offset)
        idx.append(b.indices)
        dat.append(b.data)
        offset += b.nnz
    total_rows = sum(b.rows for b in blocks)
    out = SparseMatrix(field, (total_rows, n), np.concatenate(ptrs),
                       np.concatenate(idx), np.concatenate(dat), check=False)
    if rows is not None and rows != total_rows:
        if rows > total_rows:
            raise ValueError("cannot truncate to more rows than stacked")
        out = out.row_slice(0, rows)
    return out


def measure_sparsity(A: SparseMatrix) -> float:
    """Fraction of zero entries; 1.0 for an empty shape."""
    size = A.rows * A.cols
    if size == 0:
        return 1.0
    return 1.0 - A.nnz / size


# -- text formats ----------------------------------------------------------

def format_sparse(A: SparseMatrix) -> str:
    lines = [f"{A.field.q} {A.rows} {A.cols} {A.nnz}"]
    for r, c, v in zip(A.row_ids().tolist(), A.indices.tolist(), A.data.tolist()):
        lines.append(f"{r} {c} {v}")
    return "\n".join(lines) + "\n"


def parse_sparse(text: str) -> SparseMatrix:
    tokens = text.split()
    if len(tokens) < 4:
        raise ValueError("sparse file: missing 'q m n nnz' header")
    q, m, n, nnz = (int(t) for t in tokens[:4])
    body = tokens[4:]
    if len(body) != 3 * nnz:
        raise ValueError(f"sparse file: header says {nnz} entries, found {len(body) / 3:g}")
    field = get_field(q)
    trip = np.array(body, dtype=np.int64).reshape(nnz, 3) if nnz else np.zeros((0, 3), dtype=np.int64)
    if np.any(trip[:, 2] == 0):
        raise ValueError("sparse file: zero values must not be stored")
    return SparseMatrix.from_coo(field, (m, n), trip[:, 0], trip[:, 1], trip[:, 2])


def format_dense(x: DenseMatrix) -> str:
    lines = [f"{x.field.q} {x.rows} {x.cols}"]
    lines.extend(" ".join(str(v) for v in row) for row in x.data.tolist())
    return "\n".join(lines) + "\n"


def parse_dense(text: str) -> DenseMatrix:
    tokens = text.split()
    if len(tokens) < 3:
        raise ValueError("dense file: missing 'q rows cols' header")
    q, r, c = (int(t) for t in tokens[:3])
    body = tokens[3:]
    if len(body) != r * c:
        raise ValueError(f"dense file: expected {r * c} values, found {len(body)}")
    return DenseMatrix(get_field(q), np.array(body, dtype=np.int64).reshape(r, c))


def write_sparse(path: str | os.PathLike, A: SparseMatrix) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_sparse(A))


def read_sparse(path: str | os.PathLike) -> SparseMatrix:
    with open(path, encoding="ascii") as fh:
        return parse_sparse(fh.read())


def write_dense(path: str | os.PathLike, x: DenseMatrix) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_dense(x))


def read_dense(path: str | os.PathLike) -> DenseMatrix:
    with open(path, encoding="ascii") as fh:
        return parse_dense(fh.read())
