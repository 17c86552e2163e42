"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import math
import time
from fractions import Fraction as F

import numpy as np
import pytest
from scipy import stats

from conftest import record
from quadlab.allocation import (
    chernoff_check,
    conditioned_allocation_exact,
    generating_function_at_twelfth,
    local_floor_sweep,
    m_at_twelfth_bracket,
    normalization_bracket,
    p_exact,
)
from quadlab.continuum import (
    build_metric,
    contour_infimum,
    interval_min,
    labels_given_contour,
    reroot_at_min_label,
    sample_bessel_pair,
    sample_excursion,
    sample_map,
    sample_minbus,
    sample_plane,
)
from quadlab.enumeration import (
    compositions,
    count_fixed_block,
    count_quadrangulations,
    face_gluing_codes,
    labeled_tree_codes,
    lambda_count,
)
from quadlab.experiments import ExperimentConfig, run
from quadlab.metric import PointedSpace, ball, ghp_interval, ghp_pointed, glue, partition_bound, subset_bound

EXPECTED_COUNTS = (1, 2, 9, 54, 378, 2916, 24057)


# 1 -------------------------------------------------------------------------


def test_criterion_01_exact_counts():
    t0 = time.perf_counter()
    trees = [len(labeled_tree_codes(n)) for n in range(2, 9)]
    faces = [len(face_gluing_codes(n)) for n in range(2, 9)]
    closed = [count_quadrangulations(n) for n in range(2, 9)]
    elapsed = time.perf_counter() - t0
    ok = tuple(trees) == tuple(faces) == tuple(closed) == EXPECTED_COUNTS and elapsed < 600
    record(1, "exact counts n=2..8", ok, f"trees={trees} gluings={faces} in {elapsed:.1f}s")
    assert ok


# 2 -------------------------------------------------------------------------


def test_criterion_02_lambda_counts(count_tables):
    bad = []
    checked = 0
    for n in range(5, 10):
        T = count_tables[n]
        for r in (4, 5):
            if r >= n:
                continue
            total_r = 0
            for N in range(1, n - r + 1):
                marginal = 0
                for y in compositions(n - r, N):
                    lam = lambda_count(n, r, N, y)
                    checked += 1
                    if lam != T.get("rNy", n, r, N, y):
                        bad.append((n, r, N, y))
                    marginal += lam
                if marginal != T.get("rN", n, r, N) or marginal != count_fixed_block(n, r, N):
                    bad.append((n, r, N, "marginal"))
                total_r += T.get("rN", n, r, N)
            if total_r != T.get("r", n, r):
                bad.append((n, r, "sum over N"))
    record(2, "lambda_count vs brute force", not bad, f"{checked} (n,r,N,y) cells, mismatches={bad[:3]}")
    assert not bad


# 3 -------------------------------------------------------------------------


def test_criterion_03_exact_law_of_sizes(count_tables):
    bad = []
    laws = 0
    for n in range(5, 10):
        T = count_tables[n]
        for r in (4, 5):
            if r >= n:
                continue
            for N in range(1, n - r + 1):
                total = T.get("rN", n, r, N)
                law = conditioned_allocation_exact(n - r, N)
                empirical = {y: F(T.get("rNy", n, r, N, y), total) for y in compositions(n - r, N)}
                laws += 1
                if empirical != law:
                    bad.append((n, r, N))
    record(3, "enumerated law of Y equals allocation law", not bad, f"{laws} laws compared as rationals, mismatches={bad}")
    assert not bad


# 4 -------------------------------------------------------------------------


def test_criterion_04_normalization():
    b = normalization_bracket(10**6)
    heads = [p_exact(k) for k in (1, 2, 3)]
    g = generating_function_at_twelfth()
    mb = m_at_twelfth_bracket(10**6)
    ok = (
        b.lo <= 1 <= b.hi
        and b.width < 1e-9
        and heads == [F(3, 4), F(1, 8), F(3, 64)]
        and abs(g - 4 / 3) < 1e-9
        and mb.lo - 1e-9 <= 4 / 3 <= mb.hi + 1e-9
        and mb.width < 1e-9
    )
    record(4, "normalization", ok, f"sum p in [{b.lo:.15f}, {b.hi:.15f}], 1+M(1/12)={g!r}")
    assert ok


# 5 -------------------------------------------------------------------------


def test_criterion_05_chernoff_grid():
    grid = [(m, k, c * m) for m in (5, 10, 20, 40, 80) for k in (2, 4, 8, 16, 32) for c in (2, 3)]
    assert len(grid) == 50
    pts = [chernoff_check(m, k, x) for m, k, x in grid]
    bad = [(p.m, p.k, p.x) for p in pts if not p.dominated]
    worst = max(p.exact / p.bound for p in pts)
    record(5, "Chernoff domination on 50 points", not bad, f"max exact/bound={worst:.3g}, violations={bad}")
    assert not bad


# 6 -------------------------------------------------------------------------


def test_criterion_06_local_floor():
    floors = []
    for lam in (0.5, 1.0):
        floors += local_floor_sweep(range(10, 201, 10), lam)
    low = min(f for _, _, f in floors)
    ok = low > 0 and all(math.isfinite(f) for _, _, f in floors)
    record(6, "local floor over N in [10,200]", ok, f"reported floor={low:.4f} over {len(floors)} (N,m) points")
    assert ok


# 7 -------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_07_condensation():
    cfg = ExperimentConfig(name="condensation", ns=[2**k for k in range(10, 17)], beta=0.5, reps=1000, seed=0)
    rep = run(cfg)["report"]
    f1 = [row["largest_exceeds"]["freq"] for row in rep["rows"]]
    f2 = [row["second_within"]["freq"] for row in rep["rows"]]
    ex = [round(row["exact_second_within"], 4) for row in rep["rows"]]
    ok = (
        rep["largest_trend"]["nondecreasing"]
        and rep["second_trend"]["nondecreasing"]
        and rep["top_largest_ok"]
        and rep["top_second_ok"]
    )
    record(7, "condensation trends", ok, f"Y1 freq={f1} Y2 freq={f2} exact Y2={ex}")
    assert ok


# 8 -------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_08_diameter_exponent():
    cfg = ExperimentConfig(name="diameter", ns=[2**k for k in range(10, 19)], reps=200, seed=0, thresholds={"pendants": False})
    rep = run(cfg)["report"]
    ok = abs(rep["slope"] - 0.25) <= 0.05
    medians = [row["median"] for row in rep["rows"]]
    record(8, "diameter exponent", ok, f"slope={rep['slope']:.4f} +- {rep['slope_stderr']:.4f}, medians={medians}")
    assert ok


# 9 -------------------------------------------------------------------------


def _rational_space(rng, n, massless_root=False):
    pts = rng.integers(0, 5, size=(n, 2))
    D = [[F(int(abs(pts[i] - pts[j]).sum()), 2) for j in range(n)] for i in range(n)]
    m = [F(int(rng.integers(0, 4)), 3) for _ in range(n)]
    if massless_root:
        m[0] = F(0)
    return PointedSpace(list(range(n)), D, 0, m)


def test_criterion_09_ghp_soundness():
    rng = np.random.default_rng(9)
    problems = []
    for it in range(200):
        a, b, c = (_rational_space(rng, int(rng.integers(1, 6))) for _ in range(3))
        ab, ba = ghp_pointed(a, b), ghp_pointed(b, a)
        ac, cb = ghp_pointed(a, c), ghp_pointed(c, b)
        iv = ghp_pointed(a, b, "bounds")
        if ab != ba:
            problems.append((it, "symmetry"))
        if float(ab) > float(ac) + float(cb) + 1e-9:
            problems.append((it, "triangle"))
        if not iv.lo - 1e-12 <= float(ab) <= iv.hi + 1e-12:
            problems.append((it, "bracket"))
        # subset bound: W a random subset containing the root
        w = [a.root] + [i for i in range(a.n) if i != a.root and rng.random() < 0.5]
        val, W = subset_bound(a, w)
        if val < ghp_pointed(a, W):
            problems.append((it, "subset"))
        # partition bound: nearest-point cells of W, eps their largest radius
        cells = [set() for _ in w]
        for i in range(a.n):
            k = min(range(len(w)), key=lambda j: (a.dist[i, w[j]], j))
            cells[k].add(i)
        eps = max(a.dist[i, w[k]] for k, cell in enumerate(cells) for i in cell)
        val, W = partition_bound(a, w, cells, eps)
        if val < ghp_pointed(a, W):
            problems.append((it, "partition"))
    record(9, "GHP solver soundness on 200 instances", not problems, f"problems={problems[:5]}")
    assert not problems


# 10 ------------------------------------------------------------------------


def _same_space(s, t) -> bool:
    if sorted(s.points, key=repr) != sorted(t.points, key=repr) or s.points[s.root] != t.points[t.root]:
        return False
    pos = {p: i for i, p in enumerate(t.points)}
    perm = [pos[p] for p in s.points]
    return all(s.dist[i, j] == t.dist[perm[i], perm[j]] for i in range(s.n) for j in range(s.n)) and all(
        s.mass[i] == t.mass[perm[i]] for i in range(s.n)
    )


def test_criterion_10_gluing():
    rng = np.random.default_rng(10)
    identity_bad = 0
    for _ in range(100):
        x, y = _rational_space(rng, int(rng.integers(1, 6))), _rational_space(rng, int(rng.integers(1, 6)))
        radius = F(int(rng.integers(0, 9)), 2)
        if not _same_space(ball(glue(x, y), radius), glue(ball(x, radius), ball(y, radius))):
            identity_bad += 1
    ineq_bad = []
    for it in range(100):
        x, x2 = (_rational_space(rng, int(rng.integers(1, 4)), massless_root=True) for _ in range(2))
        y, y2 = (_rational_space(rng, int(rng.integers(1, 4))) for _ in range(2))
        for radius in (F(1, 2), F(1), F(2), F(4)):
            lhs = ghp_interval(ball(glue(x, y), radius), ball(glue(x2, y2), radius))
            rhs = ghp_interval(ball(x, radius), ball(x2, radius)) + ghp_interval(ball(y, radius), ball(y2, radius))
            if not lhs.hi <= rhs.lo:
                ineq_bad.append((it, radius))
    ok = identity_bad == 0 and not ineq_bad
    record(10, "gluing identity and per-ball inequality", ok, f"identity failures={identity_bad}/100, inequality failures={ineq_bad[:3]}")
    assert ok


# 11 ------------------------------------------------------------------------


def _covariance_pairs(c, reps, pairs, seed, cov):
    rng = np.random.default_rng(seed)
    Z = np.array([labels_given_contour(c, rng).values for _ in range(reps)])
    out = []
    for s, t in pairs:
        prod = Z[:, s] * Z[:, t]
        se = prod.std(ddof=1) / math.sqrt(reps)
        out.append((s, t, float(prod.mean()), float(cov[s, t]), float(se)))
    return out


def test_criterion_11_continuum():
    rng = np.random.default_rng(11)
    dominated = True
    labels_ok = True
    for i in range(40):
        e = sample_excursion(int(rng.integers(8, 80)), 1.0, rng)
        z = labels_given_contour(e, rng)
        eb, zb, _ = reroot_at_min_label(e, z)
        labels_ok &= bool((zb.values >= 0).all())
        for g in (build_metric(eb, zb, "map"), build_metric(e, z, "map")):
            dominated &= bool((g.d <= g.d_circ).all())
    for i in range(10):
        for g in (sample_plane(40, 1.0, rng), sample_minbus(30, 1.0, rng)):
            dominated &= bool((g.d <= g.d_circ).all())
    for i in range(160):
        e = sample_excursion(int(rng.integers(8, 400)), 1.0, rng)
        labels_ok &= bool((reroot_at_min_label(e, labels_given_contour(e, rng))[1].values >= 0).all())

    # covariance on fixed contours: scaled map (lifetime lam^4) and plane
    lam = 2.0
    e = sample_excursion(100, lam**4, np.random.default_rng(110))
    map_pairs = [(10, 20), (30, 80), (50, 50), (5, 95), (40, 41), (15, 60), (70, 90), (25, 26), (1, 99), (45, 55)]
    cov_map = _covariance_pairs(e, 10**4, map_pairs, 111, interval_min(e.values))
    b = sample_bessel_pair(50, 1.0, np.random.default_rng(112))
    plane_pairs = [(10, 80), (60, 90), (20, 30), (0, 100), (45, 55), (49, 51), (5, 95), (70, 71), (30, 60), (52, 99)]
    cov_plane = _covariance_pairs(b, 10**4, plane_pairs, 113, contour_infimum(b))
    cov_bad = [p for p in cov_map + cov_plane if abs(p[2] - p[3]) > 3 * p[4]]

    # lambda scaling: lam = 2 distances halved vs lam = 1, same number of seeds each
    def stats_of(lam_, seed):
        g = sample_map(64, lam_, seed)
        D = g.point_distances() / lam_
        pick = np.random.default_rng(seed).integers(D.shape[0])
        return D.max(), D[g.root, pick]

    ss = np.random.SeedSequence(114).spawn(400)
    one = np.array([stats_of(1.0, s) for s in ss[:200]])
    two = np.array([stats_of(2.0, s) for s in ss[200:]])
    p_diam = stats.ks_2samp(one[:, 0], two[:, 0]).pvalue
    p_root = stats.ks_2samp(one[:, 1], two[:, 1]).pvalue
    ok = dominated and labels_ok and not cov_bad and p_diam > 1e-3 and p_root > 1e-3
    record(
        11,
        "continuum properties",
        ok,
        f"D<=D0 {dominated}, labels>=0 {labels_ok}, covariance outside 3 sigma={len(cov_bad)}/20, lambda KS p=({p_diam:.3f}, {p_root:.3f})",
    )
    assert ok


# 12 ------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_12_limit_setup():
    cfg = ExperimentConfig(
        name="limit",
        ns=[2**k for k in range(10, 17)],
        beta=0.5,
        reps=200,
        seed=0,
        thresholds={"plane_grid": 300, "plane_reps": 200},
    )
    rep = run(cfg)["report"]
    bounds = [round(row["mean_bound"], 4) for row in rep["rows"]]
    pvals = {k: round(v["pvalue"], 4) for k, v in rep["profile_tests"].items()}
    ok = rep["bound_trend"]["strictly_decreasing"] and rep["profile_ok"]
    record(12, "limit-setup consistency", ok, f"mean bounds={bounds}, profile KS p={pvals}")
    assert ok
