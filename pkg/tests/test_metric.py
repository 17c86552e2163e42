from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadlab.metric import (
    CapExceeded,
    InvalidPartition,
    InvalidSpace,
    PointedSpace,
    ball,
    correspondence_cost,
    ghp_exact,
    ghp_local,
    ghp_pointed,
    glue,
    graph_space,
    hausdorff,
    partition_bound,
    perturbation_check,
    prokhorov,
    read_space,
    subset_bound,
    write_space,
)
from quadlab.planar_map import path_map, square


def rational_space(rng, n, massless_root=False):
    pts = rng.integers(0, 4, size=(n, 2))
    D = [[F(int(abs(pts[i] - pts[j]).sum())) for j in range(n)] for i in range(n)]
    m = [F(int(rng.integers(0, 3)), 2) for _ in range(n)]
    if massless_root:
        m[0] = F(0)
    return PointedSpace(list(range(n)), D, 0, m)


def brute_force_ghp(a, b):
    """Minimum correspondence cost over every correspondence containing the root pair."""
    others = [(i, j) for i in range(a.n) for j in range(b.n) if (i, j) != (a.root, b.root)]
    best = None
    for mask in range(1 << len(others)):
        B = [(a.root, b.root)] + [others[k] for k in range(len(others)) if mask >> k & 1]
        if {i for i, _ in B} != set(range(a.n)) or {j for _, j in B} != set(range(b.n)):
            continue
        c = correspondence_cost(a, b, B)
        best = c if best is None or c < best else best
    return best


def test_hand_examples():
    one = PointedSpace.point(1)
    two = PointedSpace.point(2)
    assert ghp_pointed(one, two) == 1
    seg = PointedSpace.from_matrix([[0, 1], [1, 0]], root=0, mass=[0, 0])
    seg2 = PointedSpace.from_matrix([[0, F(11, 10)], [F(11, 10), 0]], root=0, mass=[0, 0])
    assert ghp_pointed(seg, seg2) == F(1, 20)
    D = np.array([[F(0), F(10)], [F(10), F(0)]], dtype=object)
    assert prokhorov([F(1), F(0)], [F(0), F(1)], D) == 1


def test_exact_matches_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(60):
        a = rational_space(rng, int(rng.integers(1, 4)))
        b = rational_space(rng, int(rng.integers(1, 4)))
        assert ghp_exact(a, b) == brute_force_ghp(a, b)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_ghp_axioms(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rational_space(rng, int(rng.integers(1, 5))) for _ in range(3))
    ab = ghp_pointed(a, b)
    assert ab == ghp_pointed(b, a)
    assert ghp_pointed(a, a) == 0
    assert ab <= ghp_pointed(a, c) + ghp_pointed(c, b)
    iv = ghp_pointed(a, b, "bounds")
    assert iv.lo <= ab + 1e-12 and ab <= iv.hi + 1e-12


def test_space_json_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    s = rational_space(rng, 4)
    path = tmp_path / "s.json"
    write_space(path, s)
    t = read_space(path)
    assert t.exact and ghp_pointed(s, t) == 0
    assert (t.dist == s.dist).all() and list(t.mass) == list(s.mass)


def test_invalid_spaces():
    with pytest.raises(InvalidSpace):
        PointedSpace.from_matrix([[0, 1, 5], [1, 0, 1], [5, 1, 0]], root=0, mass=[1, 1, 1])
    with pytest.raises(InvalidSpace):
        PointedSpace.from_matrix([[0, 1], [1, 0]], root=0, mass=[1, -1])
    big = PointedSpace.from_matrix(np.ones((8, 8)) - np.eye(8), root=0, mass=np.ones(8))
    with pytest.raises(CapExceeded):
        ghp_exact(big, big)


def test_graph_space_and_balls():
    s = graph_space(path_map(4))
    assert s.diameter() == 4 and s.total_mass() == 5
    b = ball(s, 2)
    assert b.n == 3
    sq = graph_space(square(), mass="normalized")
    assert abs(sq.total_mass() - 1) < 1e-12


def test_glue_distances():
    x = PointedSpace.from_matrix([[0, 1], [1, 0]], root=0, mass=[0, 1])
    y = PointedSpace.from_matrix([[0, 2], [2, 0]], root=1, mass=[1, 1])
    z = glue(x, y)
    assert z.n == 3
    assert z.root_id == ("y", 1)
    # x's surviving point sits at distance 1 from y's root and 3 from y's other point
    assert sorted(z.dist[0].tolist()) == [0, 1, 3]


def test_glued_root_atom_breaks_the_per_ball_inequality():
    """With an atom at the identified root the gluing inequality fails."""
    d = F(1, 10)
    X = PointedSpace([0, 1], [[0, d], [d, 0]], 0, [1, 0])
    X2 = PointedSpace([0, 1], [[0, d], [d, 0]], 0, [0, 1])
    Y = PointedSpace.point(0)
    assert ghp_pointed(X, X2) == F(1, 20)
    assert ghp_pointed(glue(X, Y), glue(X2, Y)) == 1


def test_hausdorff_and_subset_bound():
    s = graph_space(path_map(4), mass=[F(1)] * 5)
    assert hausdorff(s.dist, range(5), [0, 2, 4]) == 1
    val, w = subset_bound(s, [0, 2, 4])
    assert val >= ghp_pointed(s, w)
    with pytest.raises(InvalidPartition):
        subset_bound(s, [1, 2])


def test_partition_bound():
    s = graph_space(path_map(4), mass=[F(1)] * 5)
    eps, w = partition_bound(s, [0, 2, 4], [{0, 1}, {2, 3}, {4}], 1)
    assert eps == 1 and w.total_mass() == 5
    assert ghp_pointed(s, w) <= eps
    with pytest.raises(InvalidPartition):
        partition_bound(s, [0, 4], [{0, 1, 2}, {3, 4}], 1)


def test_local_distance_brackets():
    a = graph_space(path_map(3))
    b = graph_space(path_map(4))
    iv = ghp_local(a, b, terms=5)
    assert 0 <= iv.lo <= iv.hi <= 1
    assert ghp_local(a, a, terms=5).lo == 0


def test_perturbation_check_runs():
    rep = perturbation_check(6, reps=3, weights_law="constant", seed=1, perms=20)
    assert rep.reps == 3 and max(rep.distances) == 0
    heavy = perturbation_check(8, reps=3, weights_law="heavy", seed=1, perms=20)
    assert all(0 <= d <= 1 for d in heavy.distances)
    assert all(h["bound"] <= 2 for h in heavy.hoeffding)


def test_correspondences_include_root_pair():
    a = PointedSpace.from_matrix([[0, 1], [1, 0]], root=0, mass=[0, 0])
    costs = [correspondence_cost(a, a, B) for B in ([(0, 0), (1, 1)], [(0, 0), (1, 0), (0, 1), (1, 1)])]
    assert costs[0] == 0 and costs[1] == F(1, 2)
