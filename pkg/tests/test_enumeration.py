from math import comb

import pytest

from quadlab.enumeration import (
    BadAllocation,
    CapExceeded,
    Family,
    FamilySpec,
    RootBlockTooSmall,
    composition_weight,
    compositions,
    count_fixed_block,
    count_quadrangulations,
    count_two_connected,
    enumerate_family,
    enumerate_quadrangulations,
    face_gluing_codes,
    labeled_tree_codes,
    lambda_count,
    tutte_count,
)
from quadlab.planar_map import canonical_code, is_two_connected


def test_closed_form_matches_tutte():
    for faces in range(1, 12):
        assert count_quadrangulations(faces + 2) == tutte_count(faces)
    assert count_quadrangulations(2) == 1


def test_generators_agree_as_sets():
    for n in range(2, 8):
        a, b = labeled_tree_codes(n), face_gluing_codes(n)
        assert set(a) == set(b)
        assert len(a) == count_quadrangulations(n)


def test_enumeration_yields_distinct_classes():
    codes = [canonical_code(q) for q in enumerate_quadrangulations(7)]
    assert len(codes) == len(set(codes)) == 2916


def test_two_connected_counts():
    assert [count_two_connected(r) for r in range(4, 9)] == [1, 2, 10, 42, 209]
    assert count_two_connected(3) == 0
    with pytest.raises(RootBlockTooSmall):
        count_two_connected(1)


def test_family_filters():
    blocks = list(enumerate_family(FamilySpec(Family.two_connected, 6)))
    assert len(blocks) == 10 and all(is_two_connected(q) for q in blocks)
    for r in (4, 5):
        for N in range(1, 8 - r + 1):
            got = sum(1 for _ in enumerate_family(FamilySpec(Family.fixed_root_block_and_faces, 8, r, N)))
            assert got == count_fixed_block(8, r, N)


def test_composition_weight_against_compositions():
    for m in range(1, 9):
        for N in range(1, m + 1):
            brute = 0
            for y in compositions(m, N):
                w = 1
                for v in y:
                    w *= count_quadrangulations(v + 1)
                brute += w
            assert composition_weight(m, N) == brute
            assert sum(1 for _ in compositions(m, N)) == comb(m - 1, N - 1)


def test_lambda_count_errors_and_cap():
    with pytest.raises(BadAllocation):
        lambda_count(9, 4, 2, (1, 3))
    with pytest.raises(CapExceeded):
        next(enumerate_quadrangulations(30))
    with pytest.raises(ValueError):
        FamilySpec(Family.fixed_root_block_and_faces, 6, 4, 5)
