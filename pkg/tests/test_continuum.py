import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadlab.continuum import (
    ContourProcess,
    InconsistentSide,
    LabelProcess,
    TieDetected,
    build_metric,
    contour_infimum,
    interval_min,
    labels_given_contour,
    minbus_glue_check,
    reroot_at_min_label,
    root_profile,
    sample_bessel_pair,
    sample_excursion,
    sample_map,
    sample_minbus,
    sample_plane,
)


def test_excursion_shape():
    e = sample_excursion(50, 2.0, 0)
    assert e.values[0] == e.values[-1] == 0
    assert (e.values[1:-1] > 0).all()
    assert e.times[-1] == pytest.approx(2.0)
    assert e.weights().sum() == pytest.approx(2.0)


def test_bessel_pair_shape():
    b = sample_bessel_pair(30, 1.5, 0)
    assert b.times[0] == pytest.approx(-1.5) and b.times[-1] == pytest.approx(1.5)
    assert b.values[b.root_index] == 0 and (b.values >= 0).all()


def test_interval_min_brute_force():
    X = np.random.default_rng(0).random(12)
    M = interval_min(X)
    for i in range(12):
        for j in range(12):
            assert M[i, j] == X[min(i, j) : max(i, j) + 1].min()


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), grid=st.integers(6, 60))
def test_map_invariants(seed, grid):
    rng = np.random.default_rng(seed)
    e = sample_excursion(grid, 1.0, rng)
    z = labels_given_contour(e, rng)
    ebar, zbar, _ = reroot_at_min_label(e, z)
    assert (zbar.values >= 0).all()
    assert (ebar.values >= 0).all()
    g = build_metric(ebar, zbar, "map")
    assert (g.d <= g.d_circ + 1e-12).all()
    D = g.point_distances()
    assert np.allclose(D, D.T)
    # D[i, k] <= D[i, j] + D[j, k]
    assert (D[:, None, :] <= D[:, :, None] + D[None, :, :] + 1e-9).all()
    assert g.mass.sum() == pytest.approx(1.0)


def test_labels_respect_tree_identifications():
    rng = np.random.default_rng(5)
    e = sample_excursion(40, 1.0, rng)
    z = labels_given_contour(e, rng)
    X = e.values
    for i in range(X.size):
        for j in range(i + 1, X.size):
            if X[i] == X[j] == X[i : j + 1].min():
                assert z.values[i] == pytest.approx(z.values[j])


def test_distances_dominate_label_gaps():
    g = sample_map(60, 1.0, 3)
    Z = g.labels.values
    rep = np.array([int(np.flatnonzero(g.tree_class == c)[0]) for c in range(g.d.shape[0])])
    gap = np.abs(Z[rep][:, None] - Z[rep][None, :])
    assert (g.d >= gap - 1e-12).all()


def test_lambda_scaling_is_exact_for_shared_seed():
    a = sample_map(40, 1.0, 7)
    b = sample_map(40, 2.0, 7)
    assert np.allclose(b.point_distances(), 2.0 * a.point_distances())
    assert b.mass.sum() == pytest.approx(16.0)


def test_plane_and_minbus_masses():
    p = sample_plane(30, 1.0, 2)
    assert p.mass.sum() == pytest.approx(2.0)
    m = sample_minbus(30, 1.0, 2)
    assert m.mass.sum() == pytest.approx(3.0)
    assert (m.d <= m.d_circ + 1e-12).all()
    prof = root_profile(p.space(), [0.1, 0.5, 1.0, 100.0])
    assert prof == sorted(prof) and prof[-1] == pytest.approx(2.0)


def test_plane_cross_rule_uses_outer_arcs():
    c = ContourProcess(np.array([-1.0, 0.0, 1.0]), np.array([2.0, 0.0, 3.0]), "bessel_pair")
    inf = contour_infimum(c)
    # times of opposite sign: infimum over the outer arcs, both ends included
    assert inf[0, 2] == 2.0
    assert inf[0, 1] == 0.0


def test_tie_detection():
    e = ContourProcess(np.linspace(0, 1, 5), np.array([0.0, 1.0, 2.0, 1.0, 0.0]), "excursion")
    z = LabelProcess(np.array([0.0, -1.0, 0.5, 0.2, 0.0]))
    # grid times 1 and 3 are one tree vertex: not a tie
    z_same = LabelProcess(np.array([0.0, -1.0, 0.5, -1.0, 0.0]))
    assert reroot_at_min_label(e, z_same)[2] is False
    z_tie = LabelProcess(np.array([0.0, -1.0, -1.0, 0.2, 0.0]))
    assert reroot_at_min_label(e, z_tie)[2] is True
    with pytest.raises(TieDetected):
        reroot_at_min_label(e, z_tie, strict=True)
    assert reroot_at_min_label(e, z)[2] is False


def test_side_mismatch():
    e = sample_excursion(10, 1.0, 0)
    z = labels_given_contour(e, 0)
    with pytest.raises(InconsistentSide):
        build_metric(e, z, "plane")
    with pytest.raises(InconsistentSide):
        reroot_at_min_label(sample_bessel_pair(10, 1.0, 0), z)


def test_minbus_equals_glue_on_shared_inputs():
    out = minbus_glue_check(gridsize=24, seed=1, reps=5)
    assert out["shared_inputs_equal"]
    assert out["shared_max_distance_gap"] < 1e-9
    assert out["direct_total_mass"] == pytest.approx(out["expected_total_mass"])
