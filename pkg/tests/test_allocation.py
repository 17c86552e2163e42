from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from quadlab.allocation import (
    BudgetExceeded,
    allocation_weight_closed,
    allocation_weight_total,
    chernoff_eta,
    conditioned_allocation_exact,
    mean_nu,
    n_tail_probability,
    n_weights,
    p_exact,
    p_float,
    prob_sum_equals,
    prob_sum_equals_closed,
    sample_conditioned,
    truncated_tail,
    wilson,
)
from quadlab.enumeration import composition_weight, count_fixed_block, count_two_connected


def test_weight_law_head():
    assert [p_exact(k) for k in (1, 2, 3)] == [Fraction(3, 4), Fraction(1, 8), Fraction(3, 64)]
    p = p_float(50)
    assert np.allclose(p[:10], [float(p_exact(k)) for k in range(1, 11)], rtol=1e-12)


def test_nu_enclosure_contains_two():
    nu = mean_nu(10**5)
    assert 2 in nu
    assert nu.width < 1e-6


def test_allocation_weights_three_ways():
    for m in range(1, 20):
        for N in range(1, m + 1):
            a = allocation_weight_closed(m, N)
            assert a == allocation_weight_total(m, N) == composition_weight(m, N)


def test_small_conditioned_law():
    law = conditioned_allocation_exact(4, 2)
    assert law == {(1, 3): Fraction(9, 22), (2, 2): Fraction(2, 11), (3, 1): Fraction(9, 22)}
    assert prob_sum_equals(2, 4) == Fraction(11, 128) == prob_sum_equals_closed(2, 4)
    assert sum(law.values()) == 1


@settings(max_examples=25, deadline=None)
@given(m=st.integers(1, 12), data=st.data())
def test_conditioned_law_is_exchangeable(m, data):
    N = data.draw(st.integers(1, m))
    law = conditioned_allocation_exact(m, N)
    assert sum(law.values()) == 1
    for y, p in law.items():
        assert law[tuple(reversed(y))] == p


def test_sampler_matches_exact_law():
    m, N = 9, 3
    law = conditioned_allocation_exact(m, N)
    keys = list(law)
    for strategy in ("dp", "jump"):
        ys = sample_conditioned(m, N, seed=5, reps=20000, strategy=strategy)
        assert (ys.sum(axis=1) == m).all()
        counts = {k: 0 for k in keys}
        for row in map(tuple, ys.tolist()):
            counts[row] += 1
        obs = np.array([counts[k] for k in keys])
        exp = np.array([float(law[k]) for k in keys]) * obs.sum()
        assert stats.chisquare(obs, exp).pvalue > 1e-3


def test_truncated_tail_small_case():
    # S_2^1 takes values in {0, 1, 2} with P(xi = 1) = 3/4
    assert truncated_tail(2, 1, 2) == Fraction(9, 16)
    assert truncated_tail(2, 1, 0) == 1
    assert chernoff_eta(1) >= 0


def test_n_weights_sum_to_root_block_family():
    n, r = 12, 5
    w = n_weights(n, r, closed=False)
    assert w.tail_bound == 0
    assert w.weights == [count_fixed_block(n, r, N) // count_two_connected(r) for N in range(1, n - r + 1)]
    assert n_tail_probability(n, r, 1) == 1


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        conditioned_allocation_exact(60, 20)


def test_wilson_interval():
    lo, hi = wilson(50, 100)
    assert lo < 0.5 < hi
