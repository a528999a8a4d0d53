"""Compressed sparse-column storage and loaders for libsvm and Matrix Market files."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = [
    "FormatError",
    "UnsupportedFormatError",
    "SparseMatrix",
    "load_libsvm",
    "load_matrix_market",
    "write_matrix_market",
    "max_row_nnz",
]


class FormatError(ValueError):
    """Raised when an input file does not follow its declared format."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class UnsupportedFormatError(FormatError):
    """Raised for well-formed files whose variant is not supported."""


@dataclass(frozen=True)
class SparseMatrix:
    """Immutable real matrix in compressed sparse-column layout.

    Column ``j`` occupies ``row_idx[col_ptr[j]:col_ptr[j+1]]`` and the matching
    slice of ``values``; row indices are strictly increasing inside a column.
    """

    rows: int
    cols: int
    col_ptr: np.ndarray
    row_idx: np.ndarray
    values: np.ndarray
    row_nnz: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        col_ptr = np.ascontiguousarray(self.col_ptr, dtype=np.int64)
        row_idx = np.ascontiguousarray(self.row_idx, dtype=np.int64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        rows, cols = int(self.rows), int(self.cols)
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if col_ptr.shape != (cols + 1,):
            raise ValueError("col_ptr must have length cols + 1")
        if col_ptr[0] != 0 or col_ptr[-1] != len(values) or len(row_idx) != len(values):
            raise ValueError("col_ptr must start at 0 and end at nnz")
        if np.any(np.diff(col_ptr) < 0):
            raise ValueError("col_ptr must be nondecreasing")
        if len(row_idx) and (row_idx.min() < 0 or row_idx.max() >= rows):
            raise ValueError("row index out of range")
        # a non-increasing step is only allowed across a column boundary
        inner = np.ones(max(len(row_idx) - 1, 0), dtype=bool)
        bounds = col_ptr[1:-1] - 1
        inner[bounds[(bounds >= 0) & (bounds < len(inner))]] = False
        if np.any(np.diff(row_idx)[inner] <= 0):
            raise ValueError("row indices must be strictly increasing within a column")
        for name, arr in (("col_ptr", col_ptr), ("row_idx", row_idx), ("values", values)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        row_nnz = np.bincount(row_idx, minlength=rows).astype(np.int64)
        row_nnz.setflags(write=False)
        object.__setattr__(self, "row_nnz", row_nnz)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def nnz(self):
        return len(self.values)

    def column(self, j):
        """Return ``(row_indices, values)`` views of column ``j``."""
        lo, hi = self.col_ptr[j], self.col_ptr[j + 1]
        return self.row_idx[lo:hi], self.values[lo:hi]

    def column_indices(self):
        """Column index of every stored entry."""
        return np.repeat(np.arange(self.cols, dtype=np.int64), np.diff(self.col_ptr))

    def column_norms_sq(self):
        return np.bincount(
            self.column_indices(), weights=self.values**2, minlength=self.cols
        )

    @classmethod
    def from_scipy(cls, mat):
        csc = sp.csc_matrix(mat, dtype=np.float64, copy=True)
        csc.sum_duplicates()
        csc.sort_indices()
        return cls(csc.shape[0], csc.shape[1], csc.indptr, csc.indices, csc.data)

    @classmethod
    def from_dense(cls, arr):
        arr = np.atleast_2d(np.asarray(arr, dtype=np.float64))
        return cls.from_scipy(sp.csc_matrix(arr))

    def to_scipy(self):
        return sp.csc_matrix(
            (self.values, self.row_idx, self.col_ptr), shape=self.shape, copy=False
        )

    def toarray(self):
        return self.to_scipy().toarray()

    def matvec(self, x):
        return self.to_scipy() @ np.asarray(x, dtype=np.float64)

    def rmatvec(self, y):
        return self.to_scipy().T @ np.asarray(y, dtype=np.float64)


def max_row_nnz(A):
    """Largest number of stored entries in any row (0 for an empty matrix)."""
    if A.rows == 0:
        return 0
    return int(A.row_nnz.max())


def load_libsvm(path):
    """Read a libsvm/svmlight file into ``(A, b)``.

    Each line is ``label idx:val ...`` with 1-based, strictly increasing
    feature indices. Lines become rows of ``A`` and labels are returned
    verbatim as ``b``. Blank lines and ``#`` comments are skipped.
    """
    labels = []
    rows, cols, vals = [], [], []
    n_features = 0
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            try:
                label = float(tokens[0])
            except ValueError:
                raise FormatError(f"bad label {tokens[0]!r}", lineno) from None
            sample = len(labels)
            labels.append(label)
            prev = 0
            for tok in tokens[1:]:
                idx_s, sep, val_s = tok.partition(":")
                if not sep:
                    raise FormatError(f"expected idx:val, got {tok!r}", lineno)
                try:
                    idx = int(idx_s)
                    val = float(val_s)
                except ValueError:
                    raise FormatError(f"bad entry {tok!r}", lineno) from None
                if idx < 1:
                    raise FormatError(f"feature index {idx} is not 1-based", lineno)
                if idx <= prev:
                    raise FormatError(
                        f"feature indices must be strictly increasing ({idx} after {prev})",
                        lineno,
                    )
                prev = idx
                rows.append(sample)
                cols.append(idx - 1)
                vals.append(val)
            n_features = max(n_features, prev)
    if not labels:
        raise FormatError("no samples")
    coo = sp.coo_matrix(
        (np.asarray(vals, dtype=np.float64), (np.asarray(rows), np.asarray(cols))),
        shape=(len(labels), n_features),
    )
    return SparseMatrix.from_scipy(coo), np.asarray(labels, dtype=np.float64)


def _read_data_lines(fh, start_lineno):
    for lineno, raw in enumerate(fh, start=start_lineno):
        line = raw.strip()
        if line and not line.startswith("%"):
            yield lineno, line


def load_matrix_market(path):
    """Read a ``coordinate real general`` Matrix Market file.

    Duplicate ``(i, j)`` entries are summed. Any other variant (pattern,
    integer, complex, symmetric, array) raises :class:`UnsupportedFormatError`.
    """
    with open(path) as fh:
        header = fh.readline()
        fields = header.split()
        if len(fields) != 5 or fields[0] != "%%MatrixMarket":
            raise FormatError("missing %%MatrixMarket header", 1)
        obj, fmt, kind, symm = (f.lower() for f in fields[1:])
        if obj != "matrix":
            raise UnsupportedFormatError(f"unsupported object {obj!r}", 1)
        if fmt != "coordinate":
            raise UnsupportedFormatError(f"unsupported format {fmt!r}", 1)
        if kind != "real":
            raise UnsupportedFormatError(f"unsupported field {kind!r}", 1)
        if symm != "general":
            raise UnsupportedFormatError(f"unsupported symmetry {symm!r}", 1)

        lines = _read_data_lines(fh, 2)
        try:
            lineno, size_line = next(lines)
        except StopIteration:
            raise FormatError("missing size line") from None
        try:
            m, n, nnz = (int(t) for t in size_line.split())
        except ValueError:
            raise FormatError(f"bad size line {size_line!r}", lineno) from None

        ii = np.empty(nnz, dtype=np.int64)
        jj = np.empty(nnz, dtype=np.int64)
        vv = np.empty(nnz, dtype=np.float64)
        count = 0
        for lineno, line in lines:
            if count == nnz:
                raise FormatError("more entries than declared", lineno)
            parts = line.split()
            if len(parts) != 3:
                raise FormatError(f"expected 'row col value', got {line!r}", lineno)
            try:
                i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise FormatError(f"bad entry {line!r}", lineno) from None
            if not (1 <= i <= m and 1 <= j <= n):
                raise FormatError(f"entry ({i}, {j}) outside {m}x{n}", lineno)
            ii[count], jj[count], vv[count] = i - 1, j - 1, v
            count += 1
        if count != nnz:
            raise FormatError(f"declared {nnz} entries, found {count}")
    return SparseMatrix.from_scipy(sp.coo_matrix((vv, (ii, jj)), shape=(m, n)))


def write_matrix_market(A, path, comment=None):
    """Write ``A`` as ``coordinate real general`` with round-trip exact values."""
    with open(os.fspath(path), "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        if comment:
            for line in str(comment).splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{A.rows} {A.cols} {A.nnz}\n")
        for j in range(A.cols):
            rows, vals = A.column(j)
            fh.writelines(f"{r + 1} {j + 1} {v!r}\n" for r, v in zip(rows.tolist(), vals.tolist()))
