"""Finite pointed metric measure spaces and pointed GHP distances.

Exact pointed GHP on finite spaces
----------------------------------
For a relation ``B`` between ``X`` and ``Y`` with distortion ``dis(B)`` and
any ``t >= dis(B)/2`` the cross distances

    C(x, y) = min_{(x', y') in B} d(x, x') + t + d'(y', y)

complete ``d`` and ``d'`` to a (pseudo)metric in which ``C <= t`` holds
exactly on ``B``.  Conversely any admissible embedding at level ``eps``
induces such a relation with ``dis <= 2 eps``.  Hence

    d_GHP = min over correspondences B containing the root pair of
            max(dis(B) / 2, pi(B)),

where ``pi(B)`` is the two-sided Prokhorov deficiency
``max_A mu(A) - mu'(B(A))`` (and symmetrically).  Since ``pi`` only
improves when ``B`` grows, it is enough to scan the maximal cliques of the
compatibility graph at each candidate distortion threshold.  Arithmetic is
generic, so rational inputs give rational outputs.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

EXACT_CAP = 6
SUBSET_CAP = 16


class CapExceeded(ValueError):
    """Exact solver called on a space larger than the cap."""


class InvalidPartition(ValueError):
    """Partition does not satisfy the covering, overlap or radius conditions."""


class InvalidSpace(ValueError):
    """Distance matrix or mass vector is malformed."""


def _num(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return Fraction(x)
    return float(x)


def _as_matrix(dist) -> np.ndarray:
    rows = [[_num(v) for v in row] for row in dist]
    exact = all(isinstance(v, Fraction) for row in rows for v in row)
    if exact:
        out = np.empty((len(rows), len(rows)), dtype=object)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                out[i, j] = v
        return out
    return np.array([[float(v) for v in row] for row in rows], dtype=float)


def _as_vector(mass, exact: bool) -> np.ndarray:
    vals = [_num(v) for v in mass]
    if exact and all(isinstance(v, Fraction) for v in vals):
        out = np.empty(len(vals), dtype=object)
        out[:] = vals
        return out
    return np.array([float(v) for v in vals], dtype=float)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    @property
    def width(self):
        return self.hi - self.lo


class PointedSpace:
    """``(points, dist, root, mass)``; ``root`` is an index into ``points``."""

    __slots__ = ("points", "dist", "root", "mass")

    def __init__(self, points: Sequence, dist, root: int, mass, check: bool = True):
        self.points = list(points)
        self.dist = dist if isinstance(dist, np.ndarray) else _as_matrix(dist)
        exact = self.dist.dtype == object
        self.mass = mass if isinstance(mass, np.ndarray) else _as_vector(mass, exact)
        self.root = int(root)
        if check:
            self.validate()

    # -- construction helpers ----------------------------------------------

    @classmethod
    def point(cls, mass=1) -> "PointedSpace":
        return cls([0], [[0]], 0, [mass])

    @classmethod
    def from_matrix(cls, dist, root: int = 0, mass=None) -> "PointedSpace":
        n = len(dist)
        return cls(list(range(n)), dist, root, [1] * n if mass is None else mass)

    def validate(self, tol: float | None = None):
        """Shape, symmetry, nonnegativity and triangle checks.

        Float matrices get a default slack of ``1e-9`` times the diameter;
        rational ones are checked exactly.
        """
        n = len(self.points)
        if tol is None:
            tol = 0.0 if self.exact else 1e-9 * max(1.0, float(np.max(self.dist, initial=0.0)))
        if self.dist.shape != (n, n) or self.mass.shape != (n,):
            raise InvalidSpace("shape mismatch between points, dist and mass")
        if not 0 <= self.root < n:
            raise InvalidSpace("root index out of range")
        d = self.dist
        for i in range(n):
            if d[i, i] != 0:
                raise InvalidSpace("nonzero diagonal")
            for j in range(n):
                if d[i, j] < 0 or d[i, j] != d[j, i]:
                    raise InvalidSpace("distance matrix is not symmetric nonnegative")
        if any(m < 0 for m in self.mass):
            raise InvalidSpace("negative mass")
        if not self.is_metric(tol):
            raise InvalidSpace("triangle inequality fails")

    def is_metric(self, tol: float = 0.0) -> bool:
        d = self.dist
        if d.dtype != object:
            n = d.shape[0]
            if n == 0:
                return True
            via = (d[:, :, None] + d[None, :, :]).min(axis=1)
            return bool(np.all(d <= via + tol))
        n = d.shape[0]
        return all(d[i, j] <= d[i, k] + d[k, j] for i in range(n) for j in range(n) for k in range(n))

    # -- basic accessors ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def exact(self) -> bool:
        return self.dist.dtype == object

    @property
    def root_id(self):
        return self.points[self.root]

    def total_mass(self):
        return sum(self.mass.tolist(), Fraction(0) if self.exact else 0.0)

    def diameter(self):
        return max(self.dist.ravel().tolist(), default=0)

    def root_distances(self) -> np.ndarray:
        return self.dist[self.root]

    def restrict(self, idx: Sequence[int], mass=None) -> "PointedSpace":
        idx = [int(i) for i in idx]
        if self.root not in idx:
            raise InvalidSpace("restriction must keep the root")
        sub = self.dist[np.ix_(idx, idx)]
        m = self.mass[idx] if mass is None else mass
        return PointedSpace([self.points[i] for i in idx], sub, idx.index(self.root), m, check=False)

    def scaled(self, dist_factor=1, mass_factor=1) -> "PointedSpace":
        return PointedSpace(self.points, self.dist * dist_factor, self.root, self.mass * mass_factor, check=False)

    def with_mass(self, mass) -> "PointedSpace":
        return PointedSpace(self.points, self.dist, self.root, mass if isinstance(mass, np.ndarray) else _as_vector(mass, self.exact), check=False)

    # -- serialisation -----------------------------------------------------

    def to_json(self) -> dict:
        def enc(v):
            return str(v) if isinstance(v, Fraction) else float(v)

        return {
            "points": [p if isinstance(p, (int, str)) else str(p) for p in self.points],
            "dist": [[enc(v) for v in row] for row in self.dist.tolist()],
            "root": self.root_id,
            "mass": [enc(v) for v in self.mass.tolist()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PointedSpace":
        points = list(obj["points"])
        if obj["root"] not in points:
            raise InvalidSpace(f"root {obj['root']!r} is not a point")
        return cls(points, obj["dist"], points.index(obj["root"]), obj["mass"])

    def __repr__(self) -> str:
        return f"PointedSpace(n={self.n}, root={self.root_id!r})"


def read_space(path) -> PointedSpace:
    with open(path, encoding="utf-8") as fh:
        return PointedSpace.from_json(json.load(fh))


def write_space(path, s: PointedSpace):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(s.to_json(), fh)


# ---------------------------------------------------------------------------
# graphs as spaces
# ---------------------------------------------------------------------------


def graph_space(m, root_vertex: int | None = None, scale=1.0, mass="counting", vertices=None) -> PointedSpace:
    """Vertices of a map with graph distance times ``scale``.

    ``mass`` is ``"counting"``, ``"normalized"`` or an explicit weight vector
    (one entry per listed vertex).  ``vertices`` restricts to a subset while
    keeping the distances of the whole map (an induced-subspace view); the
    root defaults to the tail of the root edge.
    """
    root_vertex = int(m.org[m.root]) if root_vertex is None else int(root_vertex)
    verts = np.arange(m.n_vertices) if vertices is None else np.asarray(vertices, np.int64)
    if root_vertex not in set(verts.tolist()):
        raise InvalidSpace("root vertex not among the listed vertices")
    D = np.empty((verts.size, verts.size), float)
    for i, v in enumerate(verts.tolist()):
        D[i] = m.distances_from(v)[verts]
    if isinstance(mass, str):
        if mass == "counting":
            w = np.ones(verts.size)
        elif mass == "normalized":
            w = np.full(verts.size, 1.0 / verts.size)
        else:
            raise ValueError(f"unknown mass recipe {mass!r}")
    else:
        w = np.asarray(mass, float)
    root_idx = int(np.flatnonzero(verts == root_vertex)[0])
    return PointedSpace(verts.tolist(), D * float(scale), root_idx, w, check=False)


# ---------------------------------------------------------------------------
# balls and gluing
# ---------------------------------------------------------------------------


def ball(s: PointedSpace, radius) -> PointedSpace:
    idx = [i for i in range(s.n) if s.dist[s.root, i] <= radius]
    return s.restrict(idx)


def glue(x: PointedSpace, y: PointedSpace) -> PointedSpace:
    """Identify the root of ``x`` with the root of ``y``.

    ``x``'s root leaves the point set together with its mass; cross
    distances pass through the shared point; the new root is ``y``'s.
    """
    keep = [i for i in range(x.n) if i != x.root]
    nx_, ny = len(keep), y.n
    exact = x.exact and y.exact
    n = nx_ + ny
    D = np.empty((n, n), dtype=object if exact else float)
    for a, i in enumerate(keep):
        for b, j in enumerate(keep):
            D[a, b] = x.dist[i, j]
        for b in range(ny):
            D[a, nx_ + b] = x.dist[i, x.root] + y.dist[y.root, b]
            D[nx_ + b, a] = D[a, nx_ + b]
    for a in range(ny):
        for b in range(ny):
            D[nx_ + a, nx_ + b] = y.dist[a, b]
    mass = np.empty(n, dtype=object if exact else float)
    for a, i in enumerate(keep):
        mass[a] = x.mass[i]
    for b in range(ny):
        mass[nx_ + b] = y.mass[b]
    points = [("x", x.points[i]) for i in keep] + [("y", p) for p in y.points]
    return PointedSpace(points, D, nx_ + y.root, mass, check=False)


# ---------------------------------------------------------------------------
# Prokhorov distance
# ---------------------------------------------------------------------------


def _deficiency_subsets(mu, nu, adj: np.ndarray):
    """``max_A mu(A) - nu(N(A))`` over all ``A`` (exact, by bitmasks)."""
    nx_, ny = adj.shape
    if nx_ > SUBSET_CAP:
        raise CapExceeded("too many points for subset enumeration")
    nbr = [int(sum(1 << j for j in range(ny) if adj[i, j])) for i in range(nx_)]
    zero = Fraction(0) if isinstance(mu[0] if len(mu) else 0, Fraction) else 0.0
    # nu of every subset of Y is needed only for reachable neighbourhoods
    best = zero
    mu_of = [zero] * (1 << nx_)
    nb_of = [0] * (1 << nx_)
    cache: dict[int, object] = {0: zero}
    for A in range(1, 1 << nx_):
        low = (A & -A).bit_length() - 1
        prev = A & (A - 1)
        mu_of[A] = mu_of[prev] + mu[low]
        nb_of[A] = nb_of[prev] | nbr[low]
        S = nb_of[A]
        if S not in cache:
            cache[S] = sum((nu[j] for j in range(ny) if S >> j & 1), zero)
        gap = mu_of[A] - cache[S]
        if gap > best:
            best = gap
    return best


def _deficiency_flow(mu, nu, adj: np.ndarray) -> float:
    """Same deficiency via max-flow: ``mu(X) - maxflow``."""
    G = nx.DiGraph()
    nx_, ny = adj.shape
    for i in range(nx_):
        if mu[i] > 0:
            G.add_edge("s", ("x", i), capacity=float(mu[i]))
    for j in range(ny):
        if nu[j] > 0:
            G.add_edge(("y", j), "t", capacity=float(nu[j]))
    for i, j in zip(*np.nonzero(adj)):
        if mu[i] > 0 and nu[j] > 0:
            G.add_edge(("x", int(i)), ("y", int(j)))
    total = float(sum(float(v) for v in mu))
    if "s" not in G or "t" not in G:
        return max(total, 0.0)
    flow = nx.maximum_flow_value(G, "s", "t")
    return max(total - flow, 0.0)


def deficiency(mu, nu, adj: np.ndarray):
    if adj.shape[0] <= SUBSET_CAP:
        return _deficiency_subsets(list(mu), list(nu), adj)
    return _deficiency_flow(mu, nu, adj)


def prokhorov(mu, nu, dist) -> float | Fraction:
    """Two-sided Prokhorov distance of two finite measures on one space.

    ``eps`` is admissible iff ``mu(A) <= nu(A^eps) + eps`` and the reverse
    hold for every ``A``; the deficiencies are step functions of ``eps``
    that only change at distance values, so the minimum is over
    ``max(t, deficiency(t))`` with ``t`` ranging over distances.
    """
    dist = dist if isinstance(dist, np.ndarray) else _as_matrix(dist)
    exact = dist.dtype == object
    mu = _as_vector(mu, exact)
    nu = _as_vector(nu, exact)
    ts = sorted(set(dist.ravel().tolist()) | {dist.dtype.type(0) if not exact else Fraction(0)})
    best = None
    for t in ts:
        if best is not None and t >= best:
            break
        adj = dist <= t
        d = max(deficiency(mu, nu, adj), deficiency(nu, mu, adj.T))
        val = max(t, d)
        if best is None or val < best:
            best = val
    return best


def hausdorff(dist, A: Sequence[int], B: Sequence[int]):
    sub = dist[np.ix_(list(A), list(B))]
    return max(max(sub.min(axis=1).tolist()), max(sub.min(axis=0).tolist()))


# ---------------------------------------------------------------------------
# pointed GHP: exact
# ---------------------------------------------------------------------------


def _pair_gap(a: PointedSpace, b: PointedSpace):
    """``g[(i,j),(k,l)] = |d(i,k) - d'(j,l)| / 2`` as a 4-d array."""
    half = Fraction(1, 2) if (a.exact and b.exact) else 0.5
    da = a.dist[:, None, :, None]
    db = b.dist[None, :, None, :]
    g = da - db
    return np.abs(g) * half if g.dtype != object else np.vectorize(lambda v: abs(v) * half, otypes=[object])(g)


def _correspondence_cost_parts(a: PointedSpace, b: PointedSpace, pairs: Sequence[tuple[int, int]]):
    adj = np.zeros((a.n, b.n), dtype=bool)
    for i, j in pairs:
        adj[i, j] = True
    pi = max(deficiency(a.mass, b.mass, adj), deficiency(b.mass, a.mass, adj.T))
    dis = max(
        (abs(a.dist[i, k] - b.dist[j, l]) for (i, j) in pairs for (k, l) in pairs),
        default=0,
    )
    return dis, pi


def correspondence_cost(a: PointedSpace, b: PointedSpace, pairs: Sequence[tuple[int, int]]):
    """``max(dis(B)/2, pi(B))`` for a correspondence containing the roots."""
    pairs = list(dict.fromkeys((int(i), int(j)) for i, j in pairs))
    if (a.root, b.root) not in pairs:
        raise ValueError("correspondence must contain the root pair")
    if {i for i, _ in pairs} != set(range(a.n)) or {j for _, j in pairs} != set(range(b.n)):
        raise ValueError("relation is not a correspondence")
    dis, pi = _correspondence_cost_parts(a, b, pairs)
    half = Fraction(1, 2) if (a.exact and b.exact) else 0.5
    return max(dis * half, pi)


def ghp_exact(a: PointedSpace, b: PointedSpace, cap: int = EXACT_CAP):
    if a.n > cap or b.n > cap:
        raise CapExceeded(f"exact mode is limited to {cap} points per side")
    gap = _pair_gap(a, b)
    root = (a.root, b.root)
    nodes = [(i, j) for i in range(a.n) for j in range(b.n)]
    thresholds = sorted(set(gap.ravel().tolist()))
    best = None
    for t in thresholds:
        if best is not None and t >= best:
            break
        # pairs compatible with the root pair at this threshold
        cand = [p for p in nodes if p != root and gap[root[0], root[1], p[0], p[1]] <= t and gap[p[0], p[1], p[0], p[1]] <= t]
        G = nx.Graph()
        G.add_nodes_from(cand)
        for u, v in itertools.combinations(cand, 2):
            if gap[u[0], u[1], v[0], v[1]] <= t:
                G.add_edge(u, v)
        cliques = nx.find_cliques(G) if cand else iter([[]])
        for cl in cliques:
            B = [root] + list(cl)
            if len({i for i, _ in B}) != a.n or len({j for _, j in B}) != b.n:
                continue
            adj = np.zeros((a.n, b.n), dtype=bool)
            for i, j in B:
                adj[i, j] = True
            pi = max(deficiency(a.mass, b.mass, adj), deficiency(b.mass, a.mass, adj.T))
            val = max(t, pi)
            if best is None or val < best:
                best = val
    return best


# ---------------------------------------------------------------------------
# pointed GHP: bounds
# ---------------------------------------------------------------------------


def _root_profile_bound(a: PointedSpace, b: PointedSpace) -> float:
    ra = np.asarray(a.root_distances(), float)
    rb = np.asarray(b.root_distances(), float)
    diff = np.abs(ra[:, None] - rb[None, :])
    return 0.5 * max(diff.min(axis=1).max(), diff.min(axis=0).max())


def _ball_mass_bound(a: PointedSpace, b: PointedSpace, iters: int = 60) -> float:
    """Largest ``eps`` violating ``mu(B(rho)) <= mu'(B(rho + 2 eps)) + eps``."""
    ra = np.asarray(a.root_distances(), float)
    rb = np.asarray(b.root_distances(), float)
    ma = np.asarray(a.mass, float)
    mb = np.asarray(b.mass, float)

    def ok(eps: float) -> bool:
        for r1, m1, r2, m2 in ((ra, ma, rb, mb), (rb, mb, ra, ma)):
            for rho in np.unique(r1):
                if m1[r1 <= rho].sum() > m2[r2 <= rho + 2 * eps].sum() + eps + 1e-12:
                    return False
        return True

    hi = float(max(ma.sum(), mb.sum(), 0.0)) + 1.0
    if ok(0.0):
        return 0.0
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return lo


def ghp_lower(a: PointedSpace, b: PointedSpace) -> float:
    diam = 0.5 * abs(float(a.diameter()) - float(b.diameter()))
    mass = abs(float(a.total_mass()) - float(b.total_mass()))
    return float(max(diam, mass, _root_profile_bound(a, b), _ball_mass_bound(a, b)))


def _greedy_pairs(a: PointedSpace, b: PointedSpace) -> list[tuple[int, int]]:
    ra = np.asarray(a.root_distances(), float)
    rb = np.asarray(b.root_distances(), float)
    pairs = [(a.root, b.root)]
    for i in range(a.n):
        pairs.append((i, int(np.argmin(np.abs(rb - ra[i])))))
    for j in range(b.n):
        pairs.append((int(np.argmin(np.abs(ra - rb[j]))), j))
    return pairs


def _identity_pairs(a: PointedSpace, b: PointedSpace) -> list[tuple[int, int]] | None:
    common = set(a.points) & set(b.points)
    if not common:
        return None
    ia = {p: i for i, p in enumerate(a.points)}
    ib = {p: j for j, p in enumerate(b.points)}
    pairs = [(a.root, b.root)] + [(ia[p], ib[p]) for p in common]
    for i, p in enumerate(a.points):
        if p not in common:
            pairs.append((i, min((ib[c] for c in common), key=lambda j: float(a.dist[i, ia[b.points[j]]]))))
    for j, p in enumerate(b.points):
        if p not in common:
            pairs.append((min((ia[c] for c in common), key=lambda i: float(b.dist[j, ib[a.points[i]]])), j))
    return pairs


def ghp_upper(a: PointedSpace, b: PointedSpace) -> float:
    cands = []
    trivial = max(float(a.diameter()), float(b.diameter())) / 2
    cands.append(max(trivial, abs(float(a.total_mass()) - float(b.total_mass()))))
    for pairs in (_greedy_pairs(a, b), _identity_pairs(a, b)):
        if pairs is not None:
            cands.append(float(correspondence_cost(a, b, pairs)))
    return float(min(cands))


def ghp_pointed(a: PointedSpace, b: PointedSpace, mode: str = "exact", cap: int = EXACT_CAP):
    """Pointed GHP distance: a number in exact mode, an ``Interval`` in bounds mode."""
    if mode == "exact":
        return ghp_exact(a, b, cap)
    if mode == "bounds":
        lo, hi = ghp_lower(a, b), ghp_upper(a, b)
        return Interval(min(lo, hi), hi)
    raise ValueError(f"unknown mode {mode!r}")


def ghp_interval(a: PointedSpace, b: PointedSpace, cap: int = EXACT_CAP) -> Interval:
    """Exact value as a degenerate interval when small, bounds otherwise."""
    if a.n <= cap and b.n <= cap:
        v = ghp_exact(a, b, cap)
        return Interval(v, v)
    return ghp_pointed(a, b, "bounds")


def ghp_local(a: PointedSpace, b: PointedSpace, terms: int = 8, cap: int = EXACT_CAP) -> Interval:
    """Bracket of ``sum_{r>=1} min(d(B_r(a), B_r(b)), 1) / 2^r``."""
    if terms < 1:
        raise ValueError("terms must be positive")
    lo = hi = 0.0
    for r in range(1, terms + 1):
        iv = ghp_interval(ball(a, r), ball(b, r), cap)
        lo += min(float(iv.lo), 1.0) / 2**r
        hi += min(float(iv.hi), 1.0) / 2**r
    return Interval(lo, hi + 2.0**-terms)


# ---------------------------------------------------------------------------
# deterministic bounds from sub-spaces and partitions
# ---------------------------------------------------------------------------


def subset_bound(v: PointedSpace, w_idx: Sequence[int], w_mass=None):
    """``max(d_H(V, W), d_P(mu, mu_W))`` for ``W`` a subset containing the root."""
    w_idx = [int(i) for i in w_idx]
    if v.root not in w_idx:
        raise InvalidPartition("subset must contain the root")
    if len(set(w_idx)) != len(w_idx) or not all(0 <= i < v.n for i in w_idx):
        raise InvalidPartition("bad subset indices")
    full = np.zeros(v.n, dtype=v.mass.dtype)
    if v.exact:
        full[:] = Fraction(0)
    wm = v.mass[w_idx] if w_mass is None else _as_vector(w_mass, v.exact)
    for k, i in enumerate(w_idx):
        full[i] = wm[k]
    dh = hausdorff(v.dist, range(v.n), w_idx)
    dp = prokhorov(v.mass, full, v.dist)
    return max(dh, dp), v.restrict(w_idx, wm)


def partition_bound(v: PointedSpace, w_idx: Sequence[int], parts: Sequence[Iterable[int]], eps):
    """``eps`` when ``{P_w}`` is an admissible partition; the pushed measure on ``W``."""
    w_idx = [int(i) for i in w_idx]
    if v.root not in w_idx:
        raise InvalidPartition("W must contain the root")
    if len(parts) != len(w_idx):
        raise InvalidPartition("one part per point of W is required")
    parts = [set(int(i) for i in p) for p in parts]
    covered = set().union(*parts) if parts else set()
    if covered != set(range(v.n)):
        raise InvalidPartition("parts do not cover the space")
    for a, b in itertools.combinations(range(len(parts)), 2):
        if any(v.mass[i] > 0 for i in parts[a] & parts[b]):
            raise InvalidPartition("overlapping parts carry mass")
    for w, p in zip(w_idx, parts):
        if any(v.dist[i, w] > eps for i in p):
            raise InvalidPartition(f"part of point {w} leaves the {eps}-ball")
    if any(min(v.dist[i, w] for w in w_idx) > eps for i in range(v.n)):
        raise InvalidPartition("W is not eps-dense")
    zero = Fraction(0) if v.exact else 0.0
    # points in several parts: mass zero, so any split is fine
    nu = [sum((v.mass[i] for i in p), zero) for p in parts]
    return eps, v.restrict(w_idx, _as_vector(nu, v.exact))


def fact_bounds(v: PointedSpace, w: dict):
    """Dispatch on ``w["kind"]``: ``"subset"`` or ``"partition"``."""
    kind = w.get("kind", "subset")
    if kind == "subset":
        return subset_bound(v, w["points"], w.get("mass"))[0]
    if kind == "partition":
        return partition_bound(v, w["points"], w["parts"], w["eps"])[0]
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# exchangeable perturbations of the counting measure
# ---------------------------------------------------------------------------


def perturbation_weights(law: str, r: int, rng: np.random.Generator) -> np.ndarray:
    if law == "constant":
        return np.ones(r)
    if law == "heavy":
        from .allocation import p_float

        p = p_float(10**5)
        cdf = np.cumsum(p) / p.sum()
        return (np.searchsorted(cdf, rng.random(r)) + 1).astype(float)
    if law == "atom":
        w = np.zeros(r)
        w[rng.integers(r)] = 1.0
        return w
    raise ValueError(f"unknown weight law {law!r}")


def prokhorov_graph(D: np.ndarray, mu: np.ndarray, nu: np.ndarray) -> float:
    """Prokhorov distance on a graph metric (integer distances, flow-based)."""
    ts = np.unique(D)
    best = math.inf
    for t in ts.tolist():
        if t >= best:
            break
        adj = D <= t
        d = max(_deficiency_flow(mu, nu, adj), _deficiency_flow(nu, mu, adj.T))
        best = min(best, max(t, d))
    return float(best)


@dataclass
class PerturbationReport:
    r: int
    law: str
    reps: int
    distances: list[float]
    ratio_l2_l1: list[float]
    hoeffding: list[dict]

    @property
    def median(self) -> float:
        return float(np.median(self.distances))

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "law": self.law,
            "reps": self.reps,
            "median": self.median,
            "median_over_r_quarter": self.median / self.r**0.25,
            "distances": self.distances,
            "ratio_l2_l1": self.ratio_l2_l1,
            "hoeffding": self.hoeffding,
        }


def perturbation_check(r: int, reps: int = 10, weights_law: str = "heavy", seed=0, perms: int = 200, block=None) -> PerturbationReport:
    """Prokhorov distance between ``n/|n|_1`` and ``1/r`` on a random 2-connected block.

    Also tallies, for root balls ``V``, how often
    ``|n(V)/|n|_1 - |V|/r| > 2t/|n|_1`` over random permutations of the
    weights against ``2 exp(-2 t^2 / |n|_2^2)``.
    """
    from .samplers import sample_two_connected

    rng = np.random.default_rng(seed)
    dists, ratios, hoeff = [], [], []
    for _ in range(reps):
        R = block if block is not None else sample_two_connected(r, rng)
        S = graph_space(R)
        D = S.dist
        w = perturbation_weights(weights_law, R.n_vertices, rng)
        rng.shuffle(w)
        l1, l2 = w.sum(), math.sqrt((w**2).sum())
        ratios.append(float(l2 / l1))
        mu = w / l1
        nu = np.full(R.n_vertices, 1.0 / R.n_vertices)
        dists.append(prokhorov_graph(D, mu, nu))
        root_d = D[S.root]
        for rad in (1, 2):
            V = root_d <= rad
            t = 0.5 * l2
            hits = 0
            for _ in range(perms):
                pw = rng.permutation(w)
                if abs(pw[V].sum() / l1 - V.sum() / R.n_vertices) > 2 * t / l1:
                    hits += 1
            hoeff.append({"radius": rad, "t": float(t), "freq": hits / perms, "bound": float(2 * math.exp(-2 * t * t / (l2 * l2)))})
    return PerturbationReport(r, weights_law, reps, dists, ratios, hoeff)
