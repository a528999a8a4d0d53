"""Serial and parallel active-set coordinate descent, plus the uniform baseline.

All three methods share one cycle structure. Inside a cycle, coordinates
are drawn from the two-class distribution and updated with the
``beta``-penalized closed-form step. At the cycle boundary the residual is
recomputed from ``x`` (repairing any drift left by concurrent workers), the
stationarity direction ``h(x)`` is formed, the partition ``(I, J)`` and the
cycle length are refreshed, and the stopping rules are checked.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import _kernels
from .identify import candidate_active_set, next_cycle_size, update_partition
from .problem import SolverState, objective, residual_refresh
from .sampler import make_rng
from .subproblem import full_direction

__all__ = [
    "MODES",
    "SolverParams",
    "Epoch",
    "RunRecord",
    "beta",
    "uniform_beta",
    "stopping_norm",
    "solve",
]

log = logging.getLogger(__name__)

MODES = ("serial_active", "parallel_active", "parallel_uniform")
_ALIASES = {"serial": "serial_active"}


def _normalize_mode(mode):
    mode = str(mode).replace("-", "_")
    mode = _ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    return mode


@dataclass(frozen=True)
class SolverParams:
    """Run configuration. ``c0`` and ``l_max`` default to ``n`` and ``1000 n``."""

    mode: str = "parallel_active"
    tau: int = 1
    delta_dp: int = 10
    delta_f: int = 1
    alpha: float = 0.5
    c0: int | None = None
    epsilon: float = 1e-6
    l_max: int | None = None
    f_target: float | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", _normalize_mode(self.mode))
        if self.tau < 1:
            raise ValueError("tau must be >= 1")
        if self.delta_dp < 1 or self.delta_f < 1:
            raise ValueError("delta_dp and delta_f must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.c0 is not None and self.c0 < 1:
            raise ValueError("c0 must be >= 1")
        if self.c0 is not None and self.l_max is not None and self.l_max < self.c0:
            raise ValueError("l_max must be >= c0")

    def resolved(self, n_vars):
        """Copy with defaults filled in for a problem with ``n_vars`` coordinates."""
        c0 = n_vars if self.c0 is None else self.c0
        l_max = 1000 * n_vars if self.l_max is None else self.l_max
        if l_max < c0:
            raise ValueError("l_max must be >= c0")
        return replace(self, c0=c0, l_max=l_max)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Epoch:
    ell: int
    objective: float
    h_norm: float
    v_norm: float
    size_I: int
    size_J: int
    beta: float
    drift: float


@dataclass
class RunRecord:
    params: SolverParams
    termination: str
    total_updates: int
    epochs: list
    wall_time: float
    final_x_nnz: int
    x: np.ndarray = field(repr=False)
    objective: float = float("nan")
    I: np.ndarray = field(default=None, repr=False)
    J: np.ndarray = field(default=None, repr=False)
    blocks: list = field(default=None, repr=False)

    @property
    def max_drift(self):
        return max((e.drift for e in self.epochs), default=0.0)

    def trace(self, name):
        return np.array([getattr(e, name) for e in self.epochs])


def beta(tau, delta_dp, size_I, size_J, omega):
    """Step penalty that makes ``tau`` simultaneous draws descend in expectation."""
    q = delta_dp * size_I + size_J
    if q <= 0:
        raise ValueError("need at least one block")
    return (tau - 1) * (delta_dp * min(size_I, omega) + min(size_J, omega)) / q + 1.0


def uniform_beta(tau, m, omega):
    return 1.0 + (tau - 1) * min(m, omega) / m


def stopping_norm(s):
    return float(np.linalg.norm(s.v))


def solve(p, params, x0=None, record_blocks=False):
    """Run one method on problem ``p`` and return its :class:`RunRecord`.

    ``x0`` defaults to the zero vector. With ``record_blocks`` the drawn
    coordinate indices are kept per cycle (one array per worker).
    """
    m, n = p.n_vars, p.n_cols
    params = params.resolved(m)
    mode = params.mode
    tau = 1 if mode == "serial_active" else params.tau
    delta = 1 if mode == "parallel_uniform" else params.delta_dp
    identify = mode != "parallel_uniform"
    eps = params.epsilon

    s = SolverState.initial(p, x0, eps, cycle_size=params.c0)
    rngs = [make_rng(params.seed + w) for w in range(tau)]
    A = p.A
    lip = np.ascontiguousarray(p.lipschitz)
    kernel = _kernels.serial_cycle if mode == "serial_active" else _kernels.async_worker
    epochs, blocks = [], [] if record_blocks else None
    termination = None
    pool = ThreadPoolExecutor(max_workers=tau) if tau > 1 else None

    t_start = time.perf_counter()
    try:
        while termination is None:
            size_I, size_J = len(s.I), len(s.J)
            if mode == "serial_active":
                b = 1.0
            elif mode == "parallel_uniform":
                b = uniform_beta(tau, m, p.omega)
            else:
                b = beta(tau, delta, size_I, size_J, p.omega)
            gamma = max(s.cycle_size // tau, 1)
            us = [rng.random(gamma) for rng in rngs]
            seqs = [np.empty(gamma, dtype=np.int64) for _ in range(tau)]
            args = (A.col_ptr, A.row_idx, A.values, lip, n, p.lam, b, s.x, s.r, s.v,
                    s.I, s.J, float(delta))
            if pool is None:
                kernel(*args, us[0], seqs[0])
            else:
                futures = [pool.submit(kernel, *args, u, seq) for u, seq in zip(us, seqs)]
                for fut in futures:
                    fut.result()
            if record_blocks:
                blocks.append(seqs)
            s.iter_count += gamma * tau

            drift = residual_refresh(p, s)
            F = objective(p, s)
            if not np.isfinite(F):
                termination = "numerical_failure"
                epochs.append(Epoch(s.iter_count, F, np.nan, np.nan, size_I, size_J, b, drift))
                break
            h = full_direction(p, s, 1.0)
            h_norm = float(np.linalg.norm(h))
            if identify:
                s.I, s.J = update_partition(candidate_active_set(s.x, h, params.alpha), m)
                s.cycle_size = next_cycle_size(len(s.I), params.delta_f, m, params.c0)
            v_norm = stopping_norm(s)
            epochs.append(Epoch(s.iter_count, F, h_norm, v_norm, len(s.I), len(s.J), b, drift))
            log.debug("ell=%d F=%.12g |h|=%.3g |I|=%d beta=%.4g drift=%.2g",
                      s.iter_count, F, h_norm, len(s.I), b, drift)

            if params.f_target is not None and F <= params.f_target:
                termination = "target_reached"
            elif v_norm <= eps:
                termination = "v_small"
            elif s.iter_count >= params.l_max:
                termination = "budget"
    finally:
        if pool is not None:
            pool.shutdown()
    wall = time.perf_counter() - t_start

    return RunRecord(
        params=params,
        termination=termination,
        total_updates=s.iter_count,
        epochs=epochs,
        wall_time=wall,
        final_x_nnz=int(np.count_nonzero(s.x)),
        x=s.x,
        objective=epochs[-1].objective,
        I=s.I,
        J=s.J,
        blocks=blocks,
    )
