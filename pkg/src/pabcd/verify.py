"""Monte-Carlo and combinatorial checks of the sampling results behind the method.

Every check returns a list of :class:`Check` rows. A row passes when the
observed value lies within ``n_sigma`` standard errors of the expected one
(or, for one-sided bounds, below it plus that slack).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import full_gradient, SolverState
from .sampler import (
    SamplerSpec,
    blocks_from_uniforms,
    conditional_probability_formula,
    intersection_distribution,
    intersection_second_moment,
    make_rng,
    probabilities,
)
from .solvers import beta
from .subproblem import block_directions

__all__ = [
    "Check",
    "check_conditional_probability",
    "extend_decomposition",
    "check_extension",
    "check_expected_descent",
    "exact_single_draw_expectation",
]

_CHUNK = 500_000


@dataclass(frozen=True)
class Check:
    name: str
    expected: float
    observed: float
    se: float
    passed: bool
    note: str = ""

    @property
    def z(self):
        if self.se == 0:
            return 0.0 if self.observed == self.expected else np.inf
        return (self.observed - self.expected) / self.se

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.note})" if self.note else ""
        return (f"[{status}] {self.name}: expected={self.expected:.6g} "
                f"observed={self.observed:.6g} se={self.se:.3g}{extra}")


def _two_sided(name, expected, observed, se, n_sigma, note=""):
    if se == 0:
        ok = bool(np.isclose(observed, expected, rtol=0, atol=1e-12))
    else:
        ok = abs(observed - expected) <= n_sigma * se
    return Check(name, float(expected), float(observed), float(se), ok, note)


def check_conditional_probability(spec, S, tau, trials, seed=0, n_sigma=4.0, min_count=100):
    """Compare sampled multisets against the conditional-hit and binomial formulas.

    For each ``k`` and each ``i`` in ``S`` the observed mean number of copies
    of ``i`` among multisets with ``k`` elements in ``S`` is compared with
    :func:`conditional_probability_formula`. Given ``k`` hits, that count is
    ``Binomial(k, pi_i)``, which sets the standard error. Strata with fewer
    than ``min_count`` samples are reported as skipped (passed, with a note).
    The frequencies of ``|S ^ B| = k`` and the second moment are checked too.
    """
    S = sorted(int(s) for s in S)
    rng = make_rng(seed)
    n_k = np.zeros(tau + 1, dtype=np.int64)
    mult_sum = np.zeros((len(S), tau + 1))
    sq_sum = 0.0
    sq_sq_sum = 0.0
    S_arr = np.asarray(S)
    done = 0
    while done < trials:
        size = min(_CHUNK, trials - done)
        draws = blocks_from_uniforms(spec, rng.random((size, tau)))
        k = np.isin(draws, S_arr).sum(axis=1)
        n_k += np.bincount(k, minlength=tau + 1)
        for a, i in enumerate(S):
            mult_sum[a] += np.bincount(k, weights=(draws == i).sum(axis=1), minlength=tau + 1)
        k2 = k.astype(np.float64) ** 2
        sq_sum += k2.sum()
        sq_sq_sum += (k2**2).sum()
        done += size

    weights = np.where(spec.in_I()[S_arr], spec.delta_dp, 1.0)
    share = weights / weights.sum()
    out = []
    for k in range(tau + 1):
        for a, i in enumerate(S):
            name = f"E[copies of {i} | |S^B|={k}]"
            expected = conditional_probability_formula(spec, S, k, tau, i)
            if n_k[k] < min_count:
                out.append(Check(name, expected, np.nan, np.nan, True,
                                 f"skipped: only {n_k[k]} samples"))
                continue
            observed = mult_sum[a, k] / n_k[k]
            se = np.sqrt(k * share[a] * (1 - share[a]) / n_k[k])
            out.append(_two_sided(name, expected, observed, se, n_sigma, f"n={n_k[k]}"))

    probs = intersection_distribution(spec, S, tau)
    for k in range(tau + 1):
        se = np.sqrt(probs[k] * (1 - probs[k]) / trials)
        out.append(_two_sided(f"P(|S^B|={k})", probs[k], n_k[k] / trials, se, n_sigma))

    mean_sq = sq_sum / trials
    var_sq = max(sq_sq_sum / trials - mean_sq**2, 0.0)
    out.append(_two_sided("E[|S^B|^2]", intersection_second_moment(spec, S, tau), mean_sq,
                          np.sqrt(var_sq / trials), n_sigma))
    return out


def extend_decomposition(family, I, J, omega):
    """Pad every set so it meets ``I`` and ``J`` in exactly ``min(|I|,omega)``
    and ``min(|J|,omega)`` elements, adding the smallest missing indices first.

    Sets that are already saturated come back unchanged, so the map is
    idempotent. A set holding more than ``omega`` indices of ``I`` (or of
    ``J``) cannot be padded and raises ``ValueError``.
    """
    I = sorted(int(i) for i in I)
    J = sorted(int(j) for j in J)
    want_I, want_J = min(len(I), omega), min(len(J), omega)
    I_set, J_set = set(I), set(J)
    extended = []
    for S in family:
        S = set(int(s) for s in S)
        for pool, pool_set, want in ((I, I_set, want_I), (J, J_set, want_J)):
            missing = want - len(S & pool_set)
            if missing < 0:
                raise ValueError(f"set {sorted(S)} exceeds omega={omega} within one class")
            for idx in pool:
                if missing <= 0:
                    break
                if idx not in S:
                    S.add(idx)
                    missing -= 1
        extended.append(sorted(S))
    return extended


def check_extension(family, extended, I, J, omega):
    """True when ``extended`` is a valid equal-intersection padding of ``family``."""
    I_set, J_set = set(I), set(J)
    want_I, want_J = min(len(I_set), omega), min(len(J_set), omega)
    for S, Sx in zip(family, extended):
        Sx = set(Sx)
        if not set(S) <= Sx:
            return False
        if len(Sx & I_set) != want_I or len(Sx & J_set) != want_J:
            return False
        if len(Sx) != want_I + want_J or len(Sx) > 2 * omega:
            return False
    return len(family) == len(extended)


def _step_terms(p, x, I, J, delta_dp, tau):
    m = p.n_vars
    s = SolverState.initial(p, x)
    spec = SamplerSpec(m, I, J, delta_dp)
    b = beta(tau, delta_dp, len(spec.I), len(spec.J), p.omega)
    g = full_gradient(p, s)
    h = block_directions(g, p.lipschitz, b, p.lam, s.x)
    model = g * h + 0.5 * b * p.lipschitz * h * h + p.lam * h
    return s, spec, b, h, model


def _values_after_steps(p, s, counts, h):
    """``F(x + sum_i counts_i h_i e_i)`` for each row of ``counts``.

    ``psi`` is evaluated as the linear ``lam * sum(x)``: a block drawn twice
    moves twice and may leave the nonnegative orthant.
    """
    n = p.n_cols
    step = counts * h
    delta = step[:, :n] - step[:, n:]
    R = s.r[None, :] + p.A.to_scipy().dot(delta.T).T
    return 0.5 * np.einsum("ij,ij->i", R, R) + p.lam * (s.x.sum() + step.sum(axis=1))


def exact_single_draw_expectation(p, x, I, J, delta_dp):
    """``E[F(x + h_i e_i)]`` for one draw, summed over all ``m`` outcomes."""
    s, spec, _, h, _ = _step_terms(p, x, I, J, delta_dp, 1)
    vals = _values_after_steps(p, s, np.eye(p.n_vars), h)
    return float(probabilities(spec) @ vals)


def check_expected_descent(p, x, I, J, delta_dp, tau, trials, seed=0, n_sigma=3.0):
    """Monte-Carlo test of the expected one-step bound for ``tau`` simultaneous draws.

    The bound is ``F(x) + sum_i tau*P(i) * (g_i h_i + beta L_i h_i^2/2 + lam h_i)``
    with ``h`` the ``beta``-penalized directions at ``x``.
    """
    s, spec, b, h, model = _step_terms(p, x, I, J, delta_dp, tau)
    m = p.n_vars
    F0 = 0.5 * float(s.r @ s.r) + p.lam * float(s.x.sum())
    rhs = F0 + float(tau * probabilities(spec) @ model)

    rng = make_rng(seed)
    total = total_sq = 0.0
    done = 0
    while done < trials:
        size = min(_CHUNK // max(m, 1), trials - done)
        draws = blocks_from_uniforms(spec, rng.random((size, tau)))
        counts = np.zeros((size, m))
        np.add.at(counts, (np.repeat(np.arange(size), tau), draws.ravel()), 1.0)
        vals = _values_after_steps(p, s, counts, h)
        total += vals.sum()
        total_sq += (vals**2).sum()
        done += size
    mean = total / trials
    se = np.sqrt(max(total_sq / trials - mean**2, 0.0) / trials)
    tag = f"tau={tau} delta_dp={delta_dp} beta={b:.4g}"
    out = [Check(f"E[F(x+step)] <= bound ({tag})", rhs, mean, se,
                 mean <= rhs + n_sigma * se)]
    if rhs <= F0:
        out.append(Check(f"E[F(x+step)] <= F(x) ({tag})", F0, mean, se,
                         mean <= F0 + n_sigma * se))
    return out
