import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pabcd.sampler import (
    SamplerSpec,
    blocks_from_uniforms,
    conditional_probability_formula,
    hit_probability,
    intersection_count,
    intersection_distribution,
    intersection_multiset,
    intersection_second_moment,
    make_rng,
    probabilities,
    probability,
    sample_multiset,
)


def test_uniform_probabilities():
    spec = SamplerSpec.uniform(8)
    np.testing.assert_allclose(probabilities(spec), 1 / 8)
    spec = SamplerSpec(8, range(8), [], delta_dp=5)
    np.testing.assert_allclose(probabilities(spec), 1 / 8)


def test_two_class_probabilities():
    spec = SamplerSpec(7, [0, 1], range(2, 7), 5)
    assert spec.q == 15
    assert probability(spec, 0) == pytest.approx(5 / 15)
    assert probability(spec, 4) == pytest.approx(1 / 15)


def test_invalid_partition():
    with pytest.raises(ValueError):
        SamplerSpec(4, [0, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        SamplerSpec(4, [0, 1], [2])
    with pytest.raises(ValueError):
        SamplerSpec(3, [0, 1], [2], delta_dp=0)


partitions = st.integers(1, 30).flatmap(
    lambda m: st.tuples(
        st.just(m), st.sets(st.integers(0, m - 1)), st.integers(1, 20)
    )
)


@settings(max_examples=100)
@given(partitions)
def test_probabilities_sum_to_one(case):
    m, J, d = case
    spec = SamplerSpec.from_active(m, sorted(J), d)
    P = probabilities(spec)
    assert P.sum() == pytest.approx(1.0)
    if len(spec.I) and len(spec.J):
        assert P[spec.I[0]] == pytest.approx(d * P[spec.J[0]])


@settings(max_examples=100)
@given(partitions, st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=50))
def test_inverse_cdf_lands_on_correct_cell(case, u):
    m, J, d = case
    spec = SamplerSpec.from_active(m, sorted(J), d)
    P = probabilities(spec)
    order = np.concatenate([spec.I, spec.J])
    cdf = np.concatenate([[0.0], np.cumsum(P[order])])
    for ui, b in zip(u, blocks_from_uniforms(spec, np.array(u))):
        k = int(np.flatnonzero(order == b)[0])
        assert cdf[k] - 1e-12 <= ui <= cdf[k + 1] + 1e-12


def test_empirical_uniform_frequencies():
    m, n = 10, 1_000_000
    draws = sample_multiset(SamplerSpec.uniform(m), n, make_rng(7))
    counts = np.bincount(draws, minlength=m)
    sigma = math.sqrt(n * (1 / m) * (1 - 1 / m))
    assert np.all(np.abs(counts - n / m) <= 4 * sigma)


def test_empirical_two_class_frequencies():
    spec = SamplerSpec(7, [0, 1], range(2, 7), 5)
    n = 1_000_000
    counts = np.bincount(sample_multiset(spec, n, make_rng(3)), minlength=7)
    P = probabilities(spec)
    assert np.all(np.abs(counts - n * P) <= 4 * np.sqrt(n * P * (1 - P)))


def test_seed_determinism():
    spec = SamplerSpec(7, [0, 1], range(2, 7), 5)
    a = sample_multiset(spec, 100, make_rng(42))
    b = sample_multiset(spec, 100, make_rng(42))
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, sample_multiset(spec, 100, make_rng(43)))


def test_intersection_example():
    S, B = {1, 3, 5}, [1, 1, 2, 3, 4]
    assert intersection_count(S, B) == 3
    assert intersection_multiset(S, B) == [1, 1, 3]
    assert intersection_count(set(), B) == 0
    assert intersection_count(range(5), B) == len(B)


def test_distribution_and_moments():
    spec = SamplerSpec(10, range(4), range(4, 10), 5)
    S = [1, 2, 4, 6]
    p1 = hit_probability(spec, S)
    assert p1 == pytest.approx(12 / 26)
    dist = intersection_distribution(spec, S, 4)
    assert dist.sum() == pytest.approx(1.0)
    k = np.arange(5)
    assert (k**2) @ dist == pytest.approx(intersection_second_moment(spec, S, 4))


def test_conditional_formula():
    spec = SamplerSpec(10, range(4), range(4, 10), 5)
    S = [1, 2, 4, 6]
    assert conditional_probability_formula(spec, S, 0, 4, 1) == 0.0
    assert conditional_probability_formula(spec, S, 2, 4, 1) == pytest.approx(10 / 12)
    assert conditional_probability_formula(spec, S, 2, 4, 4) == pytest.approx(2 / 12)
    uni = SamplerSpec(6, range(6), [], 3)
    assert conditional_probability_formula(uni, range(6), 4, 4, 2) == pytest.approx(4 / 6)
    with pytest.raises(ValueError):
        conditional_probability_formula(spec, S, 2, 4, 3)
    with pytest.raises(ValueError):
        conditional_probability_formula(spec, S, 5, 4, 1)


@settings(max_examples=60)
@given(partitions, st.integers(1, 6), st.data())
def test_conditional_weights_sum_to_k(case, tau, data):
    m, J, d = case
    spec = SamplerSpec.from_active(m, sorted(J), d)
    S = sorted(data.draw(st.sets(st.integers(0, m - 1), min_size=1)))
    k = data.draw(st.integers(0, tau))
    total = sum(conditional_probability_formula(spec, S, k, tau, i) for i in S)
    assert total == pytest.approx(k)
