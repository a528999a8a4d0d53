"""Random sparse Lasso instances with a certified optimum.

The construction works backwards from the optimality conditions. A residual
``r*`` is drawn first; columns on the chosen support are rescaled so that
``|a_j^T r*| = lam`` and columns off the support so that ``|a_j^T r*| < lam``.
Setting ``x*_j = -sign(a_j^T r*) v_j`` on the support and ``b = A x* - r*``
then makes ``x*`` optimal with value ``1/2||r*||^2 + lam ||x*||_1``.

The support is either the ``s`` columns with the largest ``|a_j^T r*|``
(``support_rule="largest"``, the default) or a uniform random subset
(``"uniform"``). A uniform support occasionally picks a column with tiny
``|a_j^T r*|``; the rescaling then inflates it by orders of magnitude, and the
split pair ``(x+_j, x-_j)`` can only shed an overlap at rate ``2 lam / L_j``
per visit, which stalls coordinate descent near the optimum.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass

import numpy as np

from .problem import build_lasso, omega, split_solution
from .sparse import SparseMatrix, load_matrix_market, write_matrix_market

__all__ = [
    "GeneratorSpec",
    "GeneratedInstance",
    "InstanceSummary",
    "generate",
    "describe",
    "kkt_violation",
    "save_instance",
    "load_instance",
]


@dataclass(frozen=True)
class GeneratorSpec:
    rows: int
    cols: int
    nnz_per_col: int
    support_size: int | None = None
    lam: float = 1.0
    seed: int = 0
    support_rule: str = "largest"

    def __post_init__(self):
        if self.support_size is None:
            object.__setattr__(self, "support_size", max(1, min(10000, self.rows // 2)))
        if not 1 <= self.nnz_per_col <= self.rows:
            raise ValueError("nnz_per_col must lie in [1, rows]")
        if not 1 <= self.support_size <= self.cols:
            raise ValueError("support_size must lie in [1, cols]")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.support_rule not in ("largest", "uniform"):
            raise ValueError("support_rule must be 'largest' or 'uniform'")


@dataclass
class GeneratedInstance:
    spec: GeneratorSpec
    A: SparseMatrix
    b: np.ndarray
    x_star: np.ndarray
    F_star: float
    support: np.ndarray

    def problem(self):
        return build_lasso(self.A, self.b, self.spec.lam)

    @property
    def split_star(self):
        return split_solution(self.x_star)

    def target(self, rel=1e-4):
        return self.F_star * (1.0 + rel)


@dataclass(frozen=True)
class InstanceSummary:
    rows: int
    cols: int
    omega: int
    zero_percent: float

    def __str__(self):
        return f"{self.rows:,}x{self.cols:,}  omega={self.omega}  nz(x*)={self.zero_percent:.1f}%"


def _draw_column(rng, rows, p):
    idx = np.sort(rng.choice(rows, size=p, replace=False))
    return idx, rng.uniform(-1.0, 1.0, size=p)


def generate(spec):
    rng = np.random.default_rng(spec.seed)
    M, N, p, lam = spec.rows, spec.cols, spec.nnz_per_col, spec.lam

    r_star = rng.uniform(-1.0, 1.0, size=M)
    indices = np.empty((N, p), dtype=np.int64)
    values = np.empty((N, p))
    for j in range(N):
        indices[j], values[j] = _draw_column(rng, M, p)
    corr = np.einsum("jk,jk->j", values, r_star[indices])

    if spec.support_rule == "largest":
        support = np.sort(np.argsort(-np.abs(corr), kind="stable")[: spec.support_size])
    else:
        support = np.sort(rng.choice(N, size=spec.support_size, replace=False))
    on_support = np.zeros(N, dtype=bool)
    on_support[support] = True

    x_star = np.zeros(N)
    for j in range(N):
        c = corr[j]
        if on_support[j]:
            while c == 0.0:
                indices[j], values[j] = _draw_column(rng, M, p)
                c = values[j] @ r_star[indices[j]]
            values[j] *= lam / abs(c)
            x_star[j] = -np.sign(c) * (1.0 - rng.random())
        elif abs(c) > lam:
            u = 0.0
            while u == 0.0:
                u = rng.random()
            values[j] *= lam * u / abs(c)

    col_ptr = np.arange(0, N * p + 1, p, dtype=np.int64)
    A = SparseMatrix(M, N, col_ptr, indices.ravel(), values.ravel())
    b = A.matvec(x_star) - r_star
    F_star = 0.5 * float(r_star @ r_star) + lam * float(np.abs(x_star).sum())
    return GeneratedInstance(spec, A, b, x_star, F_star, support)


def kkt_violation(A, b, x, lam):
    """Largest violation of the Lasso optimality conditions at ``x``."""
    g = A.rmatvec(A.matvec(x) - b)
    on = x != 0
    viol_on = np.abs(g[on] + lam * np.sign(x[on]))
    viol_off = np.maximum(np.abs(g[~on]) - lam, 0.0)
    return float(max(viol_on.max(initial=0.0), viol_off.max(initial=0.0)))


def describe(spec, A, x_star):
    lam = spec.lam if spec is not None else 1.0
    p = build_lasso(A, np.zeros(A.rows), lam)
    zero = 100.0 * float(np.mean(np.asarray(x_star) == 0))
    return InstanceSummary(A.rows, A.cols, omega(p), zero)


def save_instance(inst, path):
    """Write ``<path>.mtx`` plus a ``<path>.json`` sidecar; return both paths."""
    base = os.fspath(path)
    if base.endswith(".mtx"):
        base = base[:-4]
    mtx, meta = base + ".mtx", base + ".json"
    write_matrix_market(inst.A, mtx, comment=f"generated lasso instance, seed {inst.spec.seed}")
    sidecar = {
        "lambda": inst.spec.lam,
        "F_star": inst.F_star,
        "support": inst.support.tolist(),
        "seed": inst.spec.seed,
        "spec": asdict(inst.spec),
        "b": inst.b.tolist(),
        "x_star": inst.x_star.tolist(),
    }
    with open(meta, "w") as fh:
        json.dump(sidecar, fh)
    return mtx, meta


def load_instance(path):
    """Read an instance written by :func:`save_instance`."""
    base = os.fspath(path)
    if base.endswith(".mtx") or base.endswith(".json"):
        base = base.rsplit(".", 1)[0]
    A = load_matrix_market(base + ".mtx")
    with open(base + ".json") as fh:
        meta = json.load(fh)
    spec = GeneratorSpec(**meta["spec"])
    return GeneratedInstance(
        spec,
        A,
        np.asarray(meta["b"], dtype=np.float64),
        np.asarray(meta["x_star"], dtype=np.float64),
        float(meta["F_star"]),
        np.asarray(meta["support"], dtype=np.int64),
    )
