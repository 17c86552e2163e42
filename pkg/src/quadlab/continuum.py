"""Grid approximations of Brownian map / plane / plane-with-minbus objects.

A contour is a path on a sorted time grid, read as piecewise linear.  Labels
are a Brownian motion indexed by the tree the contour codes: they are
sampled exactly at grid times by walking the contour while keeping the
ancestral line as a stack of ``(height, label)`` pairs, with Brownian-bridge
interpolation whenever the walk comes down between two stacked heights.

Three readings of a grid:

``map``     contour an excursion on ``[0, L]``; tree intervals ``[s, t]``;
            label pseudo-distance uses the cyclic two-arc rule.
``plane``   contour two Bessel-like paths on ``[-T, T]``; times of opposite
            sign meet along the outer arcs ``[-T, s] u [t, T]``.
``minbus``  rerooted excursion on ``[0, 1]`` with the plane attached at
            ``0 ~ 1``: negative times keep their sign, positive plane times
            are shifted by one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import stats

from .metric import PointedSpace, glue

TREE_TOL = 1e-12
CLOSURE_CAP = 4096


class TieDetected(RuntimeError):
    """Minimal label attained at more than one grid time."""


class InconsistentSide(ValueError):
    """Contour kind does not match the requested side."""


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


@dataclass
class ContourProcess:
    times: np.ndarray
    values: np.ndarray
    kind: str  # excursion | bessel_pair | concatenated
    meta: dict = field(default_factory=dict)

    @property
    def root_index(self) -> int:
        return int(np.flatnonzero(self.times == 0)[0])

    def weights(self) -> np.ndarray:
        """Trapezoid weights of the grid (Lebesgue measure of the time range)."""
        t = self.times
        w = np.zeros(t.size)
        dt = np.diff(t)
        w[:-1] += dt / 2
        w[1:] += dt / 2
        return w


@dataclass
class LabelProcess:
    values: np.ndarray

    @property
    def max_increment(self) -> float:
        return float(np.abs(np.diff(self.values)).max(initial=0.0))


# ---------------------------------------------------------------------------
# contours
# ---------------------------------------------------------------------------


def sample_excursion(gridsize: int, lifetime: float = 1.0, seed=None) -> ContourProcess:
    """Scaled simple-walk excursion with ``gridsize`` steps (rounded up to even).

    Interior strictly positive: an up step, a uniform Dyck path, a down step.
    """
    from .samplers import random_dyck_word

    if gridsize < 4:
        raise ValueError("gridsize must be at least 4")
    rng = _rng(seed)
    k = (gridsize + 1) // 2
    inner = random_dyck_word(k - 1, rng)
    steps = np.concatenate(([1], inner, [-1]))
    S = np.concatenate(([0], np.cumsum(steps)))
    M = S.size - 1
    h = lifetime / M
    return ContourProcess(np.arange(M + 1) * h, S * np.sqrt(h), "excursion", {"lifetime": float(lifetime), "steps": M})


def _bessel_path(M: int, h: float, rng) -> np.ndarray:
    walk = np.cumsum(rng.normal(0.0, np.sqrt(h), size=(M, 3)), axis=0)
    return np.concatenate(([0.0], np.sqrt((walk**2).sum(axis=1))))


def sample_bessel_pair(gridsize: int, horizon: float = 1.0, seed=None) -> ContourProcess:
    """Two independent norms of 3-d Gaussian walks joined back to back at time 0."""
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    rng = _rng(seed)
    M = int(gridsize)
    h = horizon / M
    R = _bessel_path(M, h, rng)
    Rp = _bessel_path(M, h, rng)
    times = np.arange(-M, M + 1) * h
    values = np.concatenate((Rp[:0:-1], R))
    return ContourProcess(times, values, "bessel_pair", {"horizon": float(horizon), "steps": M})


# ---------------------------------------------------------------------------
# labels
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _tree_labels(X, g):
    """Brownian labels at the grid times of the tree coded by ``X``; ``Z`` = 0 at height 0."""
    n = X.size
    Z = np.empty(n)
    hs = np.empty(n + 2)
    zs = np.empty(n + 2)
    hs[0] = 0.0
    zs[0] = 0.0
    top = 0
    gi = 0
    if X[0] > 0.0:
        top = 1
        hs[1] = X[0]
        zs[1] = np.sqrt(X[0]) * g[gi]
        gi += 1
    Z[0] = zs[top]
    for i in range(1, n):
        h = X[i]
        if h > hs[top]:
            top += 1
            hs[top] = h
            zs[top] = zs[top - 1] + np.sqrt(h - hs[top - 1]) * g[gi]
            gi += 1
        elif h < hs[top]:
            ph = hs[top]
            pz = zs[top]
            while top > 0 and hs[top] > h:
                ph = hs[top]
                pz = zs[top]
                top -= 1
            if hs[top] < h:
                lo_h = hs[top]
                lo_z = zs[top]
                a = (h - lo_h) / (ph - lo_h)
                var = (h - lo_h) * (ph - h) / (ph - lo_h)
                top += 1
                hs[top] = h
                zs[top] = lo_z + a * (pz - lo_z) + np.sqrt(var) * g[gi]
                gi += 1
        Z[i] = zs[top]
    return Z


def _plane_order(c: ContourProcess) -> np.ndarray:
    """Traversal order turning the two-sided plane rule into plain intervals.

    Forward along ``R`` (times 0..T), then back along ``R'`` from ``-T`` to
    ``0-``; times of opposite sign then enclose the two outer arcs.
    """
    i0 = c.root_index
    pos = np.arange(i0, c.times.size)
    neg = np.arange(0, i0)
    return np.concatenate((pos, neg))


def labels_given_contour(c: ContourProcess, seed=None) -> LabelProcess:
    """Centred Gaussian labels with covariance the tree infimum of the contour."""
    rng = _rng(seed)
    if c.kind == "excursion":
        X = c.values
        return LabelProcess(_tree_labels(X, rng.standard_normal(X.size + 1)))
    if c.kind == "bessel_pair":
        order = _plane_order(c)
        X = np.concatenate((c.values[order], [0.0]))
        Z = _tree_labels(X, rng.standard_normal(X.size + 1))[:-1]
        out = np.empty(c.values.size)
        out[order] = Z
        return LabelProcess(out)
    raise InconsistentSide("concatenated contours carry rerooted labels; build them with sample_minbus")


def reroot_at_min_label(e: ContourProcess, z: LabelProcess, strict: bool = False):
    """Cyclic shift to the first time of minimal label.

    Returns ``(e_bar, z_bar, tie)``; ``tie`` flags several minimisers (first
    one used); ``strict=True`` raises ``TieDetected`` instead.
    """
    if e.kind != "excursion":
        raise InconsistentSide("rerooting needs an excursion")
    M = e.values.size - 1
    Zc = z.values[:M]
    s = int(np.argmin(Zc))
    X = e.values
    # several visits of one tree vertex are not a tie
    hits = np.flatnonzero(Zc == Zc[s])
    tie = any(not (X[i] == X[j] == X[i : j + 1].min()) for i, j in zip(hits[:-1], hits[1:]))
    if tie and strict:
        raise TieDetected(f"minimal label attained at {hits.size} grid times of distinct vertices")
    j = (s + np.arange(M + 1)) % M
    j[-1] = s
    # min of X between s and j (on the linear order)
    run_f = np.minimum.accumulate(X[s:])
    run_b = np.minimum.accumulate(X[s::-1])
    mins = np.where(j >= s, run_f[np.maximum(j - s, 0)], run_b[np.maximum(s - j, 0)])
    ebar = X[s] + X[j] - 2 * mins
    ebar[0] = ebar[-1] = 0.0
    zbar = z.values[j] - z.values[s]
    zbar[0] = zbar[-1] = 0.0
    return ContourProcess(e.times.copy(), ebar, "excursion", dict(e.meta, rerooted=True)), LabelProcess(zbar), tie


def concatenate_minbus(ebar: ContourProcess, zbar: LabelProcess, plane: ContourProcess, zplane: LabelProcess):
    """Excursion on ``[0, 1]`` flanked by the plane: ``t < 0`` as is, ``t > 0`` shifted by one."""
    if ebar.kind != "excursion" or plane.kind != "bessel_pair":
        raise InconsistentSide("minbus needs an excursion and a Bessel pair")
    L = ebar.times[-1]
    i0 = plane.root_index
    times = np.concatenate((plane.times[:i0], ebar.times, L + plane.times[i0 + 1:]))
    X = np.concatenate((plane.values[:i0], ebar.values, plane.values[i0 + 1:]))
    W = np.concatenate((zplane.values[:i0], zbar.values, zplane.values[i0 + 1:]))
    meta = {"lifetime": float(L), "horizon": plane.meta.get("horizon"), "first": int(i0), "last": int(i0 + ebar.values.size - 1)}
    return ContourProcess(times, X, "concatenated", meta), LabelProcess(W)


# ---------------------------------------------------------------------------
# pseudo-metrics
# ---------------------------------------------------------------------------


def interval_min(X: np.ndarray) -> np.ndarray:
    """``out[i, j] = min X[min(i,j) .. max(i,j)]``."""
    n = X.size
    out = np.empty((n, n))
    for i in range(n):
        row = np.minimum.accumulate(X[i:])
        out[i, i:] = row
        out[i:, i] = row
    return out


def _outer_min(X: np.ndarray) -> np.ndarray:
    """``out[i, j] = min(X[..min(i,j)], X[max(i,j)..])``."""
    pre = np.minimum.accumulate(X)
    suf = np.minimum.accumulate(X[::-1])[::-1]
    i = np.arange(X.size)
    lo = np.minimum(i[:, None], i[None, :])
    hi = np.maximum(i[:, None], i[None, :])
    return np.minimum(pre[lo], suf[hi])


def contour_infimum(c: ContourProcess) -> np.ndarray:
    """Infimum of the contour over the tree interval between each pair of times."""
    X = c.values
    inner = interval_min(X)
    t = c.times
    if c.kind == "excursion":
        return inner
    if c.kind == "bessel_pair":
        cross = (t[:, None] * t[None, :]) < 0
    elif c.kind == "concatenated":
        L = c.meta["lifetime"]
        cross = ((t[:, None] * t[None, :]) < 0) & (np.maximum(t[:, None], t[None, :]) > L)
    else:
        raise InconsistentSide(f"unknown contour kind {c.kind!r}")
    return np.where(cross, _outer_min(X), inner)


def tree_distance(c: ContourProcess) -> np.ndarray:
    X = c.values
    return X[:, None] + X[None, :] - 2 * contour_infimum(c)


def label_distance(c: ContourProcess, z: LabelProcess, side: str) -> np.ndarray:
    Z = z.values
    inner = interval_min(Z)
    if side == "map":
        outer = _outer_min(Z)
        return Z[:, None] + Z[None, :] - 2 * np.maximum(inner, outer)
    return Z[:, None] + Z[None, :] - 2 * inner


@numba.njit(cache=True)
def _closure(D):
    n = D.shape[0]
    for k in range(n):
        for i in range(n):
            dik = D[i, k]
            for j in range(n):
                v = dik + D[k, j]
                if v < D[i, j]:
                    D[i, j] = v
    return D


def _components(adj: np.ndarray) -> np.ndarray:
    from scipy.sparse.csgraph import connected_components

    return connected_components(adj, directed=False)[1]


_SIDE_KIND = {"map": "excursion", "plane": "bessel_pair", "minbus": "concatenated"}


@dataclass
class GridApprox:
    contour: ContourProcess
    labels: LabelProcess
    side: str
    d_x: np.ndarray
    tree_class: np.ndarray  # grid time -> tree class
    d_circ: np.ndarray  # on tree classes
    d: np.ndarray  # on tree classes
    quotient: np.ndarray  # tree class -> point
    root: int  # point index
    mass: np.ndarray  # per point

    @property
    def n_points(self) -> int:
        return self.mass.size

    def point_distances(self) -> np.ndarray:
        rep = np.array([int(np.flatnonzero(self.quotient == p)[0]) for p in range(self.n_points)])
        return self.d[np.ix_(rep, rep)]

    def space(self, scale: float = 1.0, mass_factor: float = 1.0) -> PointedSpace:
        return PointedSpace(list(range(self.n_points)), self.point_distances() * scale, self.root, self.mass * mass_factor, check=False)

    def root_closure_gain(self) -> float:
        """``max_a D_circ(root, a) - D(root, a)`` over tree classes."""
        rc = int(self.tree_class[self.contour.root_index])
        return float((self.d_circ[rc] - self.d[rc]).max())


def build_metric(c: ContourProcess, z: LabelProcess, side: str) -> GridApprox:
    if side not in _SIDE_KIND:
        raise InconsistentSide(f"unknown side {side!r}")
    if c.kind != _SIDE_KIND[side]:
        raise InconsistentSide(f"side {side!r} needs a {_SIDE_KIND[side]} contour, got {c.kind}")
    dx = tree_distance(c)
    cls = _components(dx <= TREE_TOL)
    nc = int(cls.max()) + 1
    if nc > CLOSURE_CAP:
        raise ValueError(f"{nc} tree classes exceed the closure cap {CLOSURE_CAP}")
    dt = label_distance(c, z, side)
    dc = np.full((nc, nc), np.inf)
    np.minimum.at(dc, (cls[:, None], cls[None, :]), dt)
    np.fill_diagonal(dc, 0.0)
    d = _closure(dc.copy())
    q = _components(d <= TREE_TOL)
    w = np.bincount(q[cls], weights=c.weights(), minlength=int(q.max()) + 1)
    root = int(q[cls[c.root_index]])
    return GridApprox(c, z, side, dx, cls, dc, d, q, root, w)


# ---------------------------------------------------------------------------
# pipelines
# ---------------------------------------------------------------------------


def sample_map(gridsize: int, lam: float = 1.0, seed=None, reroot: bool = False) -> GridApprox:
    """Grid map with lifetime ``lam**4``; ``reroot`` moves the root to the minimal label."""
    rng = _rng(seed)
    e = sample_excursion(gridsize, lam**4, rng)
    z = labels_given_contour(e, rng)
    if reroot:
        e, z, _ = reroot_at_min_label(e, z)
    return build_metric(e, z, "map")


def sample_plane(gridsize: int, window: float = 1.0, seed=None) -> GridApprox:
    rng = _rng(seed)
    b = sample_bessel_pair(gridsize, window, rng)
    return build_metric(b, labels_given_contour(b, rng), "plane")


def minbus_inputs(gridsize: int, window: float = 1.0, seed=None):
    rng = _rng(seed)
    e = sample_excursion(gridsize, 1.0, rng)
    z = labels_given_contour(e, rng)
    ebar, zbar, tie = reroot_at_min_label(e, z)
    b = sample_bessel_pair(gridsize, window, rng)
    zb = labels_given_contour(b, rng)
    return ebar, zbar, b, zb, tie


def sample_minbus(gridsize: int, window: float = 1.0, seed=None) -> GridApprox:
    ebar, zbar, b, zb, _ = minbus_inputs(gridsize, window, seed)
    c, w = concatenate_minbus(ebar, zbar, b, zb)
    return build_metric(c, w, "minbus")


def sample_object(obj: str, gridsize: int, lam: float = 1.0, window: float = 1.0, seed=None) -> GridApprox:
    if obj == "map":
        return sample_map(gridsize, lam, seed)
    if obj == "plane":
        return sample_plane(gridsize, window, seed)
    if obj == "minbus":
        return sample_minbus(gridsize, window, seed)
    raise ValueError(f"unknown object {obj!r}")


def ball_mass(s: PointedSpace, radius: float) -> float:
    return float(np.asarray(s.mass, float)[np.asarray(s.root_distances(), float) <= radius].sum())


def root_profile(s: PointedSpace, radii) -> list[float]:
    return [ball_mass(s, r) for r in radii]


def _sorted_rows(D: np.ndarray) -> np.ndarray:
    return np.array(sorted(map(tuple, np.round(D, 12))))


def minbus_glue_check(gridsize: int = 64, seed=0, reps: int = 50, window: float = 1.0, radius: float = 0.5) -> dict:
    """Direct minbus grid vs ``glue(map, plane)``.

    * shared inputs: both constructions give the same distance matrix up to
      relabelling, and masses agree away from the gluing point;
    * independent seeds: two-sample KS test of the root-ball mass at
      ``radius`` and a two-radius volume growth exponent.
    """
    ebar, zbar, b, zb, _ = minbus_inputs(gridsize, window, seed)
    c, w = concatenate_minbus(ebar, zbar, b, zb)
    direct = build_metric(c, w, "minbus").space()
    glued = glue(build_metric(ebar, zbar, "map").space(), build_metric(b, zb, "plane").space())
    Dd = np.asarray(direct.dist, float)
    Dg = np.asarray(glued.dist, float)
    same_size = Dd.shape == Dg.shape
    # canonical comparison: sort points by (root distance, row multiset)
    def canon(s):
        D = np.asarray(s.dist, float)
        key = np.lexsort((np.asarray(s.mass, float), D[s.root]))
        return D[np.ix_(key, key)], np.asarray(s.mass, float)[key], D[s.root][key]

    shared_equal = False
    max_dist_gap = float("inf")
    mass_gap = float("inf")
    if same_size:
        Cd, md, rd = canon(direct)
        Cg, mg, rg = canon(glued)
        max_dist_gap = float(np.abs(np.sort(Dd.ravel()) - np.sort(Dg.ravel())).max())
        shared_equal = bool(np.allclose(rd, rg, atol=1e-9) and max_dist_gap <= 1e-9)
        mass_gap = float(abs(direct.total_mass() - glued.total_mass()))

    ss = np.random.SeedSequence(seed).spawn(2 * reps)
    a, g = [], []
    vol = {radius / 2: [], radius: []}
    for i in range(reps):
        sd = sample_minbus(gridsize, window, np.random.default_rng(ss[2 * i]))
        s_d = sd.space()
        a.append(ball_mass(s_d, radius))
        for r in vol:
            vol[r].append(ball_mass(s_d, r))
        rng = np.random.default_rng(ss[2 * i + 1])
        m = sample_map(gridsize, 1.0, rng, reroot=True).space()
        p = sample_plane(gridsize, window, rng).space()
        g.append(ball_mass(glue(m, p), radius))
    ks = stats.ks_2samp(a, g)
    v1, v2 = np.mean(vol[radius / 2]), np.mean(vol[radius])
    return {
        "gridsize": gridsize,
        "window": window,
        "shared_inputs_equal": shared_equal,
        "shared_max_distance_gap": max_dist_gap,
        "shared_mass_gap": mass_gap,
        "direct_total_mass": float(direct.total_mass()),
        "expected_total_mass": 1.0 + 2.0 * window,
        "ks_statistic": float(ks.statistic),
        "ks_pvalue": float(ks.pvalue),
        "volume_exponent": float(np.log(v2 / v1) / np.log(2.0)) if v1 > 0 and v2 > 0 else float("nan"),
    }
