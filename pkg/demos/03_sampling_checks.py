"""Monte-Carlo checks of the two-class sampler and the tau-draw descent bound.

    python demos/03_sampling_checks.py
"""

import numpy as np

from pabcd import GeneratorSpec, SamplerSpec, generate
from pabcd.sampler import conditional_probability_formula, intersection_distribution
from pabcd.verify import (
    check_conditional_probability,
    check_expected_descent,
    extend_decomposition,
)

# Ten blocks: 0..3 are sampled five times as often as 4..9.
spec = SamplerSpec(10, range(4), range(4, 10), delta_dp=5)
S = [1, 2, 4, 6]
print("P(|S ^ B| = k), tau=4:", np.round(intersection_distribution(spec, S, 4), 4))

# Given two of the four draws land in S, block 1 is expected to appear
# 2 * 5 / 12 times; this is an expected count, so it may exceed 1.
print("E[copies of 1 | k=2] =", conditional_probability_formula(spec, S, 2, 4, 1))

for c in check_conditional_probability(spec, S, 4, 1_000_000, seed=0):
    if "|S^B|=2" in c.name or c.name.startswith("P(") or "^2" in c.name:
        print(" ", c)

# Padding a separability cover so every set meets I and J equally often.
print("extended:", extend_decomposition([[1, 4], [2], [2, 5, 6]], [1, 2], [3, 4, 5, 6, 7], 3))

# tau simultaneous steps with the beta-damped direction still descend on average.
inst = generate(GeneratorSpec(15, 10, 3, 3, seed=0))
p = inst.problem()
J = np.flatnonzero(inst.split_star == 0)
I = np.setdiff1d(np.arange(p.n_vars), J)
for tau in (1, 4, 8):
    for c in check_expected_descent(p, np.zeros(p.n_vars), I, J, 10, tau, 200_000, seed=tau):
        print(" ", c)
