"""Active-set identification and the adaptive cycle length."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "IdentifyParams",
    "rho_alpha",
    "candidate_active_set",
    "update_partition",
    "next_cycle_size",
]


@dataclass(frozen=True)
class IdentifyParams:
    alpha: float = 0.5
    delta_f: int = 1
    c0: int = 1
    delta_dp: int = 10

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.delta_f < 1 or self.c0 < 1 or self.delta_dp < 1:
            raise ValueError("delta_f, c0 and delta_dp must be >= 1")


def rho_alpha(h_norm, alpha):
    """Identification threshold ``-||h||**alpha``."""
    if h_norm < 0:
        raise ValueError("h_norm must be nonnegative")
    return -(h_norm**alpha)


def candidate_active_set(x, h, alpha):
    """Coordinates that look active at their lower bound 0.

    Coordinate ``j`` is a candidate when ``0 - x_j >= rho_alpha``, i.e.
    ``x_j <= ||h||**alpha`` with ``h`` the unit-penalty direction. The upper
    bounds are infinite and never qualify.
    """
    threshold = float(np.linalg.norm(h)) ** alpha
    return np.flatnonzero(-np.asarray(x) >= -threshold)


def update_partition(C, m):
    """Take ``J = C`` and ``I`` as its complement in ``range(m)``."""
    J = np.unique(np.asarray(C, dtype=np.int64))
    if J.size and (J[0] < 0 or J[-1] >= m):
        raise ValueError("candidate set must lie in range(m)")
    mask = np.ones(m, dtype=bool)
    mask[J] = False
    return np.flatnonzero(mask), J


def next_cycle_size(size_I, delta_f, m, c0):
    return max(min(delta_f * size_I, m), c0)
