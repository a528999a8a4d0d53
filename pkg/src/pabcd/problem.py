"""Bound-constrained Lasso reformulation and its residual/gradient oracle.

The Lasso ``min 1/2 ||A x - b||^2 + lam ||x||_1`` is split as ``x = xp - xm``
with ``xp, xm >= 0``. The iterate of the split problem is one vector of length
``2N`` holding ``xp`` in its first half and ``xm`` in its second half, so
coordinate ``j`` touches column ``j mod N`` of ``A`` with sign ``+1`` for
``j < N`` and ``-1`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sparse import SparseMatrix, max_row_nnz

__all__ = [
    "InvalidInstanceError",
    "CompositeProblem",
    "SolverState",
    "build_lasso",
    "default_lambda",
    "objective",
    "gradient_block",
    "full_gradient",
    "apply_block_update",
    "residual_refresh",
    "omega",
    "split_solution",
]


class InvalidInstanceError(ValueError):
    """The data cannot define a well-posed instance (e.g. a zero column)."""


@dataclass(frozen=True)
class CompositeProblem:
    A: SparseMatrix
    b: np.ndarray
    lam: float
    lipschitz: np.ndarray
    omega: int

    @property
    def n_cols(self):
        return self.A.cols

    @property
    def n_vars(self):
        return 2 * self.A.cols

    @property
    def lower(self):
        return np.zeros(self.n_vars)

    @property
    def upper(self):
        return np.full(self.n_vars, np.inf)

    def residual(self, x):
        """``A (xp - xm) - b`` for a split vector ``x``."""
        n = self.A.cols
        return self.A.matvec(x[:n] - x[n:]) - self.b

    def value(self, x):
        r = self.residual(x)
        return 0.5 * float(r @ r) + self.lam * float(np.sum(x))


def build_lasso(A, b, lam):
    """Build the split problem for data ``(A, b)`` and weight ``lam >= 0``."""
    b = np.asarray(b, dtype=np.float64).copy()
    if b.shape != (A.rows,):
        raise InvalidInstanceError(f"b has length {b.size}, A has {A.rows} rows")
    lam = float(lam)
    if not lam >= 0:
        raise InvalidInstanceError(f"lambda must be nonnegative, got {lam}")
    norms = A.column_norms_sq()
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise InvalidInstanceError(f"column {int(zero[0])} of A is zero")
    b.setflags(write=False)
    lip = np.concatenate([norms, norms])
    lip.setflags(write=False)
    return CompositeProblem(A, b, lam, lip, 2 * max_row_nnz(A))


def default_lambda(A, b):
    """``0.1 * ||A^T b||_inf``, the usual weight for real data sets."""
    if A.cols == 0:
        return 0.0
    return 0.1 * float(np.max(np.abs(A.rmatvec(b))))


def omega(p):
    # row r gives f_r(x) = 1/2 (a_r^T (xp - xm) - b_r)^2, which touches
    # both split copies of every nonzero in the row
    return 2 * max_row_nnz(p.A)


def split_solution(x):
    """Split a Lasso vector into the nonnegative pair ``(max(x,0), max(-x,0))``."""
    x = np.asarray(x, dtype=np.float64)
    return np.concatenate([np.maximum(x, 0.0), np.maximum(-x, 0.0)])


@dataclass
class SolverState:
    """Mutable iterate plus the bookkeeping shared by the solvers.

    ``I`` and ``J`` are sorted index arrays partitioning ``range(2N)``.
    """

    x: np.ndarray
    r: np.ndarray
    v: np.ndarray
    I: np.ndarray
    J: np.ndarray
    cycle_size: int
    iter_count: int = 0

    @classmethod
    def initial(cls, p, x0=None, epsilon=1e-6, cycle_size=None):
        m = p.n_vars
        if x0 is None:
            x = np.zeros(m)
        else:
            x = np.array(x0, dtype=np.float64)
            if x.shape != (m,):
                raise ValueError(f"x0 must have length {m}")
            if not np.all(np.isfinite(x)) or np.any(x < 0):
                raise ValueError("x0 must be finite and nonnegative")
        return cls(
            x=x,
            r=p.residual(x),
            v=np.full(m, 2.0 * epsilon),
            I=np.arange(m, dtype=np.int64),
            J=np.empty(0, dtype=np.int64),
            cycle_size=m if cycle_size is None else int(cycle_size),
        )


def objective(p, s):
    return 0.5 * float(s.r @ s.r) + p.lam * float(np.sum(s.x))


def gradient_block(p, s, j):
    n = p.n_cols
    rows, vals = p.A.column(j % n)
    g = float(vals @ s.r[rows])
    return g if j < n else -g


def full_gradient(p, s):
    g = p.A.rmatvec(s.r)
    return np.concatenate([g, -g])


def apply_block_update(p, s, j, h):
    # v records the last direction even when it is zero
    s.v[j] = h
    if h == 0.0:
        return
    n = p.n_cols
    rows, vals = p.A.column(j % n)
    d = h if j < n else -h
    s.r[rows] += vals * d
    s.x[j] += h


def residual_refresh(p, s):
    """Recompute ``r`` from ``x``; return the max-norm of the correction."""
    fresh = p.residual(s.x)
    correction = float(np.max(np.abs(fresh - s.r))) if fresh.size else 0.0
    s.r[:] = fresh
    return correction
