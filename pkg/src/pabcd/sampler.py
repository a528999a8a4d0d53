"""Two-class block sampling and the multiset statistics behind the parallel step.

Blocks in ``I`` are drawn ``delta_dp`` times more often than blocks in ``J``::

    P(i) = delta_dp / q  (i in I),   P(i) = 1 / q  (i in J),   q = delta_dp*|I| + |J|

Random streams are numpy ``Generator(PCG64(seed))``. PCG64 is the
permuted congruential generator of O'Neill (2014); numpy's implementation
gives the same stream for the same seed on every platform. Draws are mapped
to blocks by the explicit inverse CDF in :func:`blocks_from_uniforms`, so a
run depends only on the seed, never on a library default sampler.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

__all__ = [
    "SamplerSpec",
    "make_rng",
    "probability",
    "probabilities",
    "blocks_from_uniforms",
    "sample_multiset",
    "intersection_multiset",
    "intersection_count",
    "hit_probability",
    "intersection_distribution",
    "intersection_second_moment",
    "conditional_probability_formula",
]


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class SamplerSpec:
    m: int
    I: np.ndarray
    J: np.ndarray
    delta_dp: int = 1

    def __post_init__(self):
        I = np.unique(np.asarray(self.I, dtype=np.int64))
        J = np.unique(np.asarray(self.J, dtype=np.int64))
        if self.delta_dp < 1 or int(self.delta_dp) != self.delta_dp:
            raise ValueError("delta_dp must be a positive integer")
        if len(I) + len(J) != self.m or np.intersect1d(I, J).size:
            raise ValueError("I and J must partition range(m)")
        if self.m and (min(I.min(initial=self.m), J.min(initial=self.m)) < 0
                       or max(I.max(initial=-1), J.max(initial=-1)) >= self.m):
            raise ValueError("indices must lie in range(m)")
        if self.m == 0:
            raise ValueError("need at least one block")
        I.setflags(write=False)
        J.setflags(write=False)
        object.__setattr__(self, "I", I)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "delta_dp", int(self.delta_dp))

    @classmethod
    def uniform(cls, m):
        return cls(m, np.arange(m), np.empty(0, dtype=np.int64), 1)

    @classmethod
    def from_active(cls, m, J, delta_dp):
        """Spec with ``J`` given and ``I`` its complement in ``range(m)``."""
        J = np.unique(np.asarray(J, dtype=np.int64))
        return cls(m, np.setdiff1d(np.arange(m), J), J, delta_dp)

    @property
    def q(self):
        return self.delta_dp * len(self.I) + len(self.J)

    def in_I(self):
        mask = np.zeros(self.m, dtype=bool)
        mask[self.I] = True
        return mask


def probability(spec, i):
    in_I = np.searchsorted(spec.I, i)
    if in_I < len(spec.I) and spec.I[in_I] == i:
        return spec.delta_dp / spec.q
    return 1.0 / spec.q


def probabilities(spec):
    return np.where(spec.in_I(), spec.delta_dp, 1.0) / spec.q


def blocks_from_uniforms(spec, u):
    """Inverse CDF of the two-class distribution applied to ``u`` in ``[0, 1)``.

    ``t = u*q`` falls in ``[0, delta_dp*|I|)`` with probability
    ``delta_dp*|I|/q``; that range is cut into ``|I|`` equal cells, the rest
    of ``[0, q)`` into ``|J|`` unit cells.
    """
    u = np.asarray(u, dtype=np.float64)
    n_i, n_j, d = len(spec.I), len(spec.J), spec.delta_dp
    t = u * spec.q
    heavy = t < d * n_i
    out = np.empty(u.shape, dtype=np.int64)
    if n_i:
        k = np.minimum((t[heavy] / d).astype(np.int64), n_i - 1)
        out[heavy] = spec.I[k]
    if n_j:
        k = np.minimum((t[~heavy] - d * n_i).astype(np.int64), n_j - 1)
        out[~heavy] = spec.J[k]
    return out


def sample_multiset(spec, tau, rng):
    """``tau`` i.i.d. block draws (repetitions allowed)."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    return blocks_from_uniforms(spec, rng.random(tau))


def intersection_multiset(S, B):
    """Elements of the multiset ``B`` lying in the set ``S``, repetitions kept."""
    S = {int(s) for s in S}
    return [b for b in np.asarray(B).tolist() if b in S]


def intersection_count(S, B):
    S = np.asarray(sorted(S), dtype=np.int64)
    if S.size == 0:
        return 0
    return int(np.isin(np.asarray(B), S).sum())


def _weighted_size(spec, S):
    S = np.asarray(sorted(S), dtype=np.int64)
    mask = spec.in_I()
    n_iS = int(mask[S].sum())
    return spec.delta_dp * n_iS + (len(S) - n_iS)


def hit_probability(spec, S):
    """Probability ``p1`` that one draw lands in ``S``."""
    return _weighted_size(spec, S) / spec.q


def intersection_distribution(spec, S, tau):
    """``P(|S ^ B| = k)`` for ``k = 0..tau``: binomial in ``tau`` and ``p1``."""
    p1 = hit_probability(spec, S)
    p2 = 1.0 - p1
    return np.array([comb(tau, k) * p1**k * p2 ** (tau - k) for k in range(tau + 1)])


def intersection_second_moment(spec, S, tau):
    """``E[|S ^ B|^2] = tau*p1*((tau-1)*p1 + 1)``."""
    p1 = hit_probability(spec, S)
    return tau * p1 * ((tau - 1) * p1 + 1)


def conditional_probability_formula(spec, S, k, tau, i):
    """Conditional weight of block ``i`` given ``k`` draws landed in ``S``.

    Returns ``k*delta_dp/w`` for ``i`` in ``I`` and ``k/w`` for ``i`` in ``J``,
    ``w = delta_dp*|I ^ S| + |J ^ S|``. The value is the conditional expected
    number of copies of ``i`` in ``B`` (it can exceed 1); it is the
    probability of ``i`` being in ``B`` only when ``k = 1``. ``k = 0`` gives 0.
    """
    if not 0 <= k <= tau:
        raise ValueError("k must lie in [0, tau]")
    if i not in {int(s) for s in S}:
        raise ValueError("i must belong to S")
    if k == 0:
        return 0.0
    weight = spec.delta_dp if spec.in_I()[i] else 1
    return k * weight / _weighted_size(spec, S)
