import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pabcd.identify import (
    IdentifyParams,
    candidate_active_set,
    next_cycle_size,
    rho_alpha,
    update_partition,
)


def test_rho():
    assert rho_alpha(0.0, 0.5) == 0.0
    assert rho_alpha(1.0, 0.3) == -1.0
    assert rho_alpha(0.01, 0.5) == pytest.approx(-0.1)
    with pytest.raises(ValueError):
        rho_alpha(-1.0, 0.5)


def test_zero_direction_gives_active_set():
    x = np.array([0.0, 1.0, 0.0, 2e-12])
    np.testing.assert_array_equal(candidate_active_set(x, np.zeros(4), 0.5), [0, 2])


def test_threshold_arithmetic():
    h = np.array([0.04, 0.0])
    np.testing.assert_array_equal(candidate_active_set(np.array([0.1, 0.3]), h, 0.5), [0])


@settings(max_examples=100)
@given(st.lists(st.floats(0, 10), min_size=1, max_size=40), st.floats(0, 5), st.floats(0.05, 0.95))
def test_candidates_match_threshold(x, hn, alpha):
    x = np.array(x)
    h = np.zeros_like(x)
    h[0] = hn
    C = candidate_active_set(x, h, alpha)
    np.testing.assert_array_equal(C, np.flatnonzero(x <= np.linalg.norm(h) ** alpha))


def test_partition_cases():
    I, J = update_partition([], 5)
    np.testing.assert_array_equal(I, range(5))
    assert J.size == 0
    I, J = update_partition(range(5), 5)
    assert I.size == 0 and J.size == 5
    I, J = update_partition([3, 1], 5)
    np.testing.assert_array_equal(I, [0, 2, 4])
    np.testing.assert_array_equal(J, [1, 3])
    with pytest.raises(ValueError):
        update_partition([5], 5)


def test_cycle_size():
    assert next_cycle_size(100, 1, 100, 1) == 100
    assert next_cycle_size(0, 1, 100, 7) == 7
    assert next_cycle_size(20, 3, 100, 10) == 60
    assert next_cycle_size(90, 3, 100, 10) == 100


def test_params_validation():
    IdentifyParams()
    with pytest.raises(ValueError):
        IdentifyParams(alpha=1.0)
    with pytest.raises(ValueError):
        IdentifyParams(delta_f=0)
