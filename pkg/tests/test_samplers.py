from collections import Counter

import numpy as np
import pytest
from scipy import stats

from quadlab.decomposition import decompose
from quadlab.enumeration import Family, FamilySpec, RootBlockTooSmall, enumerate_family, enumerate_quadrangulations
from quadlab.planar_map import canonical_code, is_quadrangulation, is_two_connected
from quadlab.samplers import (
    RejectionStats,
    Timeout,
    random_dyck_word,
    random_split_vector,
    sample_conditioned_root_block,
    sample_corpus,
    sample_fixed_block,
    sample_two_connected,
    sample_uniform_quadrangulation,
    spawn,
)


def _chi_square(codes, universe) -> float:
    c = Counter(codes)
    assert set(c) <= set(universe), "sample outside the enumerated family"
    return stats.chisquare(np.array([c.get(u, 0) for u in universe])).pvalue


def test_dyck_words_are_valid():
    rng = np.random.default_rng(0)
    for k in (1, 5, 40):
        w = random_dyck_word(k, rng)
        s = np.cumsum(w)
        assert w.size == 2 * k and s[-1] == 0 and s.min() >= 0


def test_uniform_sampler_is_uniform():
    rng = np.random.default_rng(1)
    universe = [canonical_code(q) for q in enumerate_quadrangulations(5)]
    codes = [canonical_code(sample_uniform_quadrangulation(5, rng)) for _ in range(8000)]
    assert _chi_square(codes, universe) > 1e-3


def test_two_connected_rejection_is_uniform():
    rng = np.random.default_rng(2)
    universe = [canonical_code(q) for q in enumerate_family(FamilySpec(Family.two_connected, 6))]
    st = RejectionStats()
    qs = [sample_two_connected(6, rng, stats=st) for _ in range(2000)]
    assert all(is_two_connected(q) and q.n_vertices == 6 for q in qs)
    assert _chi_square([canonical_code(q) for q in qs], universe) > 1e-3
    assert 0 < st.acceptance_rate <= 1


def test_fixed_block_is_uniform():
    rng = np.random.default_rng(3)
    n, r, N = 7, 4, 2
    universe = [canonical_code(q) for q in enumerate_family(FamilySpec(Family.fixed_root_block_and_faces, n, r, N))]
    codes = [canonical_code(sample_fixed_block(n, r, N, rng)) for _ in range(4000)]
    assert _chi_square(codes, universe) > 1e-3


def test_root_block_sampler_is_uniform():
    rng = np.random.default_rng(4)
    n, r = 8, 5
    universe = [canonical_code(q) for q in enumerate_family(FamilySpec(Family.fixed_root_block_size, n, r))]
    qs = [sample_conditioned_root_block(n, r, rng) for _ in range(5000)]
    assert _chi_square([canonical_code(q) for q in qs], universe) > 1e-3


def test_r4_root_block_is_the_square():
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = decompose(sample_conditioned_root_block(15, 4, rng))
        assert d.r == 4


def test_split_vectors():
    rng = np.random.default_rng(6)
    for _ in range(50):
        m = random_split_vector(5, 3, rng)
        assert len(m) == 7 and sum(m) == 10 and min(m) >= 1


def test_errors():
    with pytest.raises(RootBlockTooSmall):
        sample_fixed_block(10, 3, 2, 0)
    with pytest.raises(ValueError):
        sample_conditioned_root_block(5, 5, 0)
    with pytest.raises(Timeout):
        sample_two_connected(40, 0, max_attempts=1)


def test_spawned_streams_are_reproducible():
    a = sample_corpus("uniform", 5, seed=9, n=20)
    b = sample_corpus("uniform", 5, seed=9, n=20)
    assert a == b
    assert len({canonical_code(q) for q in a}) > 1
    assert all(is_quadrangulation(q) for q in a)
    assert len(spawn(0, 3)) == 3
