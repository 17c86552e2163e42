import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadlab.decomposition import (
    BadCornerChoice,
    BadSplitVector,
    decompose,
    parts_key,
    pendant_statistics,
    rebuild,
)
from quadlab.enumeration import enumerate_quadrangulations
from quadlab.planar_map import canonical_code, is_two_connected, single_edge, square, validate
from quadlab.samplers import sample_fixed_block


def _check_shape(d):
    assert sum(d.Y) == d.n - d.r
    assert len(d.Y) == d.N
    if d.r >= 4:
        assert len(d.ell) == 2 * d.r - 3
        assert sum(d.ell) == d.N
        assert is_two_connected(d.root_block)
        assert d.root_block.n_vertices == d.r


def test_round_trip_over_all_small_maps():
    for n in range(2, 8):
        for q in enumerate_quadrangulations(n):
            d = decompose(q)
            _check_shape(d)
            if d.r < 4:
                continue
            parts = d.parts()
            q2 = rebuild(*parts)
            validate(q2, quadrangulation=True)
            assert canonical_code(q2) == canonical_code(q)
            assert parts_key(decompose(q2).parts()) == parts_key(parts)


def test_square_is_its_own_root_block():
    d = decompose(square())
    assert (d.r, d.N, d.Y) == (4, 0, ())
    assert d.largest_index is None


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), r=st.integers(4, 7), N=st.integers(1, 6), extra=st.integers(0, 30))
def test_sampled_fixed_block_decomposes_back(seed, r, N, extra):
    n = r + N + extra
    q = sample_fixed_block(n, r, N, np.random.default_rng(seed))
    d = decompose(q)
    assert (d.n, d.r, d.N) == (n, r, N)
    _check_shape(d)
    C = d.C
    assert set(C) == set(d.block_vertices.tolist())
    assert sum(C.values()) == n - max(d.Y)
    assert d.r_plus_vertices.size == n - max(d.Y)
    s = pendant_statistics(d)
    assert s.Y1 == max(d.Y) and s.max_ell == max(d.ell)


def test_rebuild_argument_checks():
    R = square()
    with pytest.raises(BadSplitVector):
        rebuild(R, (1, 1, 1, 1), [], [])
    with pytest.raises(BadCornerChoice):
        rebuild(R, (1, 1, 1, 1, 2), [square()], ["up"])


def test_hand_built_map_with_mixed_pendants():
    """Square root block carrying a 4-vertex quadrangulation, two edges and a path."""
    q4 = next(q for q in enumerate_quadrangulations(4) if decompose(q).r == 4)
    q3 = next(iter(enumerate_quadrangulations(3)))
    subs = [q4, single_edge(), q3, single_edge()]
    q = rebuild(square(), (1, 2, 2, 1, 3), subs, [0, 1, 0, 1])
    d = decompose(q)
    assert (d.n, d.r, d.N) == (11, 4, 4)
    assert d.Y == (3, 1, 2, 1)
    assert d.ell == (0, 1, 1, 0, 2)
    assert d.largest_index == 0
    assert [p.corner for p in d.pendants] == [0, 1, 0, 1]
    assert [canonical_code(p.core) for p in d.pendants] == [canonical_code(s) for s in subs]
