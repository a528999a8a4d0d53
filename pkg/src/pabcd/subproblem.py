"""Closed-form coordinate directions for the split Lasso and the model ``G``.

With ``psi_j(t) = lam * t`` on ``[0, inf)`` the coordinate subproblem

    min_h  g*h + (beta*L/2) h^2 + lam*h   s.t.  x + h >= 0

is a clamped scalar quadratic, so no iterative prox is needed.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .problem import full_gradient

__all__ = [
    "BlockDirectionInput",
    "block_direction",
    "block_directions",
    "full_direction",
    "model_value_G",
]


class BlockDirectionInput(NamedTuple):
    g: float
    L: float
    beta: float = 1.0
    lam: float = 0.0
    x: float = 0.0
    lower: float = 0.0
    upper: float = math.inf


def block_direction(g, L, beta=1.0, lam=0.0, x=0.0, lower=0.0, upper=math.inf):
    """Minimizer of ``g*h + (beta*L/2) h^2 + lam*h`` over ``lower <= x + h <= upper``."""
    h = -(g + lam) / (beta * L)
    return min(max(h, lower - x), upper - x)


def block_directions(g, L, beta, lam, x):
    """Vectorized :func:`block_direction` for the ``[0, inf)`` bounds."""
    return np.maximum(-x, -(g + lam) / (beta * L))


def full_direction(p, s, beta=1.0):
    """Direction ``h^beta(x)`` for every coordinate; needs a consistent residual."""
    return block_directions(full_gradient(p, s), p.lipschitz, beta, p.lam, s.x)


def model_value_G(p, h, s, gamma):
    """``grad f(x)^T h + (gamma/2)||h||^2 + psi(x+h) - psi(x)``.

    ``gamma`` may be a scalar or one curvature per coordinate.
    """
    h = np.asarray(h, dtype=np.float64)
    g = full_gradient(p, s)
    return float(np.sum(g * h + 0.5 * np.asarray(gamma) * h * h + p.lam * h))
