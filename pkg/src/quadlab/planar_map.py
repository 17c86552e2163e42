"""Rooted planar maps stored as rotation systems.

Half-edges are numbered ``0..H-1`` with twins paired as ``2i``/``2i+1``.
``rot[h]`` is the next half-edge clockwise around ``org[h]``.  Faces are
traced by ``h -> rot[twin(h)]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numba
import numpy as np


class MapError(ValueError):
    """Base class for invalid map input."""


class InvalidRotation(MapError):
    """The rotation lists do not describe a permutation with paired twins."""


class NonPlanar(MapError):
    """Euler's formula fails."""


class Disconnected(MapError):
    """The underlying graph is not connected."""


class NotBipartite(MapError):
    """An odd cycle exists."""


class NotQuadrangulation(MapError):
    """Some face has degree other than 4."""


@dataclass(frozen=True)
class HalfEdge:
    id: int
    twin: int
    next_around_vertex: int
    origin: int


@dataclass(frozen=True)
class VertexOrder:
    """Breadth-first exploration order ``u_1, u_2, ...``."""

    order: tuple[int, ...]
    position: tuple[int, ...]
    scan_start: tuple[int, ...]


@dataclass(frozen=True)
class OrientedEdgeOrder:
    """Total order on half-edges; ``rank[h]`` is the position of ``h``."""

    order: tuple[int, ...]
    rank: tuple[int, ...]


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _face_labels(rot):
    h_count = rot.size
    face = np.full(h_count, -1, np.int64)
    nf = 0
    for h0 in range(h_count):
        if face[h0] >= 0:
            continue
        h = h0
        while face[h] < 0:
            face[h] = nf
            h = rot[h ^ 1]
        nf += 1
    return face, nf


@numba.njit(cache=True)
def _bfs_scan(rot, org, nv, root):
    """BFS with clockwise priority; returns order, position, scan start, rank."""
    h_count = rot.size
    order = np.empty(nv, np.int64)
    pos = np.full(nv, -1, np.int64)
    start = np.full(nv, -1, np.int64)
    rank = np.full(h_count, -1, np.int64)
    u = org[root]
    order[0] = u
    pos[u] = 0
    start[u] = root
    tail = 1
    head = 0
    r = 0
    while head < tail:
        v = order[head]
        head += 1
        h = start[v]
        while True:
            rank[h] = r
            r += 1
            w = org[h ^ 1]
            if pos[w] < 0:
                pos[w] = tail
                order[tail] = w
                tail += 1
                start[w] = h ^ 1
            h = rot[h]
            if h == start[v]:
                break
    return order, pos, start, rank, tail


@numba.njit(cache=True)
def _graph_dist(rot, org, first, nv, src):
    dist = np.full(nv, -1, np.int64)
    queue = np.empty(nv, np.int64)
    dist[src] = 0
    queue[0] = src
    tail = 1
    head = 0
    while head < tail:
        v = queue[head]
        head += 1
        h0 = first[v]
        if h0 < 0:
            continue
        h = h0
        while True:
            w = org[h ^ 1]
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue[tail] = w
                tail += 1
            h = rot[h]
            if h == h0:
                break
    return dist


@numba.njit(cache=True)
def _blocks(rot, org, first, nv):
    """Edge-based biconnected components (multigraph aware).

    Returns ``(block_of_edge, n_blocks, is_cut_vertex)``.
    """
    n_edges = rot.size // 2
    disc = np.full(nv, -1, np.int64)
    low = np.zeros(nv, np.int64)
    parent_edge = np.full(nv, -1, np.int64)
    it_h = np.full(nv, -1, np.int64)
    it_left = np.zeros(nv, np.int64)
    deg = np.zeros(nv, np.int64)
    for h in range(rot.size):
        deg[org[h]] += 1
    block = np.full(n_edges, -1, np.int64)
    cut = np.zeros(nv, np.bool_)
    estack = np.empty(n_edges, np.int64)
    esp = 0
    vstack = np.empty(nv, np.int64)
    nb = 0
    clock = 0
    for s in range(nv):
        if disc[s] >= 0 or deg[s] == 0:
            continue
        disc[s] = clock
        low[s] = clock
        clock += 1
        vsp = 0
        vstack[vsp] = s
        vsp += 1
        it_h[s] = first[s]
        it_left[s] = deg[s]
        root_children = 0
        while vsp > 0:
            v = vstack[vsp - 1]
            if it_left[v] > 0:
                h = it_h[v]
                it_h[v] = rot[h]
                it_left[v] -= 1
                e = h >> 1
                if e == parent_edge[v]:
                    continue
                w = org[h ^ 1]
                if disc[w] < 0:
                    estack[esp] = e
                    esp += 1
                    parent_edge[w] = e
                    disc[w] = clock
                    low[w] = clock
                    clock += 1
                    vstack[vsp] = w
                    vsp += 1
                    it_h[w] = first[w]
                    it_left[w] = deg[w]
                    if v == s:
                        root_children += 1
                elif disc[w] < disc[v]:
                    estack[esp] = e
                    esp += 1
                    if disc[w] < low[v]:
                        low[v] = disc[w]
            else:
                vsp -= 1
                if vsp > 0:
                    u = vstack[vsp - 1]
                    if low[v] < low[u]:
                        low[u] = low[v]
                    if low[v] >= disc[u]:
                        if u != s:
                            cut[u] = True
                        pe = parent_edge[v]
                        while True:
                            esp -= 1
                            f = estack[esp]
                            block[f] = nb
                            if f == pe:
                                break
                        nb += 1
        if root_children > 1:
            cut[s] = True
    return block, nb, cut


# ---------------------------------------------------------------------------
# map type
# ---------------------------------------------------------------------------


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


class RootedMap:
    """Immutable rooted map on the sphere.

    Args:
        rot: clockwise successor of each half-edge around its origin.
        org: origin vertex of each half-edge.
        first: listing start of each vertex rotation (kept for exact
            serialisation round-trips).
        root: the root half-edge (oriented edge).
    """

    __slots__ = ("rot", "org", "first", "n_vertices", "root", "_cache")

    def __init__(self, rot, org, first, root: int):
        self.rot = _frozen(rot)
        self.org = _frozen(org)
        self.first = _frozen(first)
        self.n_vertices = int(self.first.size)
        self.root = int(root)
        self._cache: dict = {}

    # -- basic accessors ---------------------------------------------------

    @property
    def n_halfedges(self) -> int:
        return int(self.rot.size)

    @property
    def n_edges(self) -> int:
        return self.n_halfedges // 2

    @staticmethod
    def twin(h: int) -> int:
        return h ^ 1

    def tail(self, h: int) -> int:
        return int(self.org[h])

    def head(self, h: int) -> int:
        return int(self.org[h ^ 1])

    def half_edges(self) -> list[HalfEdge]:
        return [
            HalfEdge(h, h ^ 1, int(self.rot[h]), int(self.org[h]))
            for h in range(self.n_halfedges)
        ]

    def rotation(self, v: int) -> tuple[int, ...]:
        h0 = int(self.first[v])
        out = [h0]
        h = int(self.rot[h0])
        while h != h0:
            out.append(h)
            h = int(self.rot[h])
        return tuple(out)

    def rotations(self) -> list[tuple[int, ...]]:
        return [self.rotation(v) for v in range(self.n_vertices)]

    def degrees(self) -> np.ndarray:
        return np.bincount(self.org, minlength=self.n_vertices)

    def edge_list(self) -> np.ndarray:
        """``(E, 2)`` array of edge endpoints, edge ``i`` = half-edge ``2i``."""
        return np.stack([self.org[0::2], self.org[1::2]], axis=1)

    # -- faces ------------------------------------------------------------

    def _faces(self):
        if "faces" not in self._cache:
            self._cache["faces"] = _face_labels(self.rot)
        return self._cache["faces"]

    @property
    def face_of(self) -> np.ndarray:
        return self._faces()[0]

    @property
    def n_faces(self) -> int:
        return int(self._faces()[1])

    def face_degrees(self) -> np.ndarray:
        return np.bincount(self.face_of, minlength=self.n_faces)

    def face_cycle(self, h: int) -> tuple[int, ...]:
        out = [h]
        g = int(self.rot[h ^ 1])
        while g != h:
            out.append(g)
            g = int(self.rot[g ^ 1])
        return tuple(out)

    # -- orders -----------------------------------------------------------

    def _scan(self):
        if "scan" not in self._cache:
            self._cache["scan"] = _bfs_scan(self.rot, self.org, self.n_vertices, self.root)
        return self._cache["scan"]

    @property
    def vertex_position(self) -> np.ndarray:
        """Position of each vertex in the exploration order."""
        return self._scan()[1]

    @property
    def edge_rank(self) -> np.ndarray:
        """Rank of each half-edge in the oriented-edge order."""
        return self._scan()[3]

    def distances_from(self, v: int) -> np.ndarray:
        return _graph_dist(self.rot, self.org, self.first, self.n_vertices, int(v))

    def blocks(self):
        if "blocks" not in self._cache:
            self._cache["blocks"] = _blocks(self.rot, self.org, self.first, self.n_vertices)
        return self._cache["blocks"]

    # -- comparisons ------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, RootedMap):
            return NotImplemented
        return (
            self.root == other.root
            and np.array_equal(self.rot, other.rot)
            and np.array_equal(self.org, other.org)
            and np.array_equal(self.first, other.first)
        )

    def __hash__(self) -> int:
        return hash((self.root, self.rot.tobytes(), self.first.tobytes()))

    def __repr__(self) -> str:
        return (
            f"RootedMap(n_vertices={self.n_vertices}, n_edges={self.n_edges}, "
            f"root={self.root})"
        )


RootedQuadrangulation = RootedMap


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------


def _from_rotations(rotations: Sequence[Sequence[int]], root: int) -> RootedMap:
    nv = len(rotations)
    total = sum(len(r) for r in rotations)
    if total == 0 or total % 2:
        raise InvalidRotation("need a positive even number of half-edges")
    rot = np.full(total, -1, np.int64)
    org = np.full(total, -1, np.int64)
    first = np.empty(nv, np.int64)
    for v, cyc in enumerate(rotations):
        if len(cyc) == 0:
            raise InvalidRotation(f"vertex {v} has no half-edges")
        first[v] = cyc[0]
        for i, h in enumerate(cyc):
            if not 0 <= h < total:
                raise InvalidRotation(f"half-edge id {h} out of range")
            if org[h] >= 0:
                raise InvalidRotation(f"half-edge {h} listed twice")
            org[h] = v
            rot[h] = cyc[(i + 1) % len(cyc)]
    if not 0 <= root < total:
        raise InvalidRotation("root out of range")
    return RootedMap(rot, org, first, root)


def validate(m: RootedMap, quadrangulation: bool = False) -> RootedMap:
    """Check connectivity, Euler's formula and optionally the face structure."""
    if m.n_vertices > 1 and np.any(m.org[0::2] == m.org[1::2]) and quadrangulation:
        raise NotBipartite("loop present")
    reached = int(m._scan()[4])
    if reached != m.n_vertices:
        raise Disconnected(f"{reached} of {m.n_vertices} vertices reachable from root")
    if m.n_vertices - m.n_edges + m.n_faces != 2:
        raise NonPlanar(
            f"V - E + F = {m.n_vertices - m.n_edges + m.n_faces} != 2"
        )
    if quadrangulation:
        if not is_bipartite(m):
            raise NotBipartite("odd cycle present")
        deg = m.face_degrees()
        if not (m.n_edges == 1 or np.all(deg == 4)):
            raise NotQuadrangulation(f"face degrees {sorted(set(deg.tolist()))}")
    return m


def build_map(
    rotation_system: Sequence[Sequence[int]],
    root: int,
    quadrangulation: bool = False,
) -> RootedMap:
    """Build and validate a rooted map from per-vertex clockwise lists."""
    return validate(_from_rotations(rotation_system, root), quadrangulation)


def from_arrays(rot, org, root: int, first=None, check: bool = True) -> RootedMap:
    rot = np.asarray(rot, dtype=np.int64)
    org = np.asarray(org, dtype=np.int64)
    if first is None:
        nv = int(org.max()) + 1 if org.size else 0
        first = np.full(nv, org.size, np.int64)
        np.minimum.at(first, org, np.arange(org.size, dtype=np.int64))
    m = RootedMap(rot, org, first, root)
    if check:
        if not np.array_equal(np.sort(rot), np.arange(rot.size)):
            raise InvalidRotation("rot is not a permutation")
        if np.any(org[rot] != org):
            raise InvalidRotation("rotation crosses vertices")
        validate(m)
    return m


def is_bipartite(m: RootedMap) -> bool:
    d = m.distances_from(m.tail(m.root))
    return bool(np.all((d[m.org[0::2]] - d[m.org[1::2]]) % 2 == 1))


def is_quadrangulation(m: RootedMap) -> bool:
    try:
        validate(m, quadrangulation=True)
    except MapError:
        return False
    return True


def is_two_connected(m: RootedMap) -> bool:
    """True when no vertex removal disconnects the map."""
    if m.n_vertices <= 2:
        return True
    _, _, cut = m.blocks()
    return not bool(cut.any())


# ---------------------------------------------------------------------------
# orders and canonical form
# ---------------------------------------------------------------------------


def bfs_orders(q: RootedMap) -> tuple[VertexOrder, OrientedEdgeOrder]:
    """Exploration order of vertices and the induced oriented-edge order.

    Each vertex is scanned clockwise starting at the half-edge through which
    it was first reached; the root tail starts at the root.
    """
    order, pos, start, rank, _ = q._scan()
    eorder = np.empty_like(rank)
    eorder[rank] = np.arange(rank.size)
    return (
        VertexOrder(tuple(order.tolist()), tuple(pos.tolist()), tuple(start.tolist())),
        OrientedEdgeOrder(tuple(eorder.tolist()), tuple(rank.tolist())),
    )


def canonical_code(q: RootedMap) -> bytes:
    """Relabel half-edges by their rank and encode the rotation system.

    Equal codes iff the rooted maps are isomorphic by an orientation
    preserving, root preserving bijection.
    """
    if "code" in q._cache:
        return q._cache["code"]
    order, _, _, rank, _ = q._scan()
    eorder = np.empty_like(rank)
    eorder[rank] = np.arange(rank.size)
    deg = np.bincount(q.org, minlength=q.n_vertices)[order]
    twin_rank = rank[eorder ^ 1]
    code = np.concatenate(([q.n_vertices, q.n_halfedges], deg, twin_rank)).astype(np.int32)
    out = code.tobytes()
    q._cache["code"] = out
    return out


def canonical_form(q: RootedMap) -> RootedMap:
    """Isomorphic copy with half-edges numbered by rank (root becomes 0).

    Twins are renumbered into the 2i/2i+1 pairing by edge order of first
    appearance.
    """
    order, pos, start, rank, _ = q._scan()
    eorder = np.empty_like(rank)
    eorder[rank] = np.arange(rank.size)
    # edge ids in order of first appearance along eorder
    edge_new = np.full(q.n_edges, -1, np.int64)
    new_id = np.empty(q.n_halfedges, np.int64)
    ne = 0
    for h in eorder.tolist():
        e = h >> 1
        if edge_new[e] < 0:
            edge_new[e] = ne
            new_id[h] = 2 * ne
            new_id[h ^ 1] = 2 * ne + 1
            ne += 1
    rot = np.empty_like(q.rot)
    rot[new_id] = new_id[q.rot]
    org = np.empty_like(q.org)
    org[new_id] = pos[q.org]
    first = new_id[start[order]]
    return RootedMap(rot, org, first, int(new_id[q.root]))


# ---------------------------------------------------------------------------
# editing
# ---------------------------------------------------------------------------


def delete_edges(m: RootedMap, remove: np.ndarray, new_root: int | None = None):
    """Remove the edges flagged in ``remove`` (length ``E``).

    Vertices are kept and must stay incident to some edge.  Returns the new
    map and the old-to-new half-edge id array (``-1`` for removed).
    """
    remove = np.asarray(remove, dtype=bool)
    keep_h = np.repeat(~remove, 2)
    new_id = np.full(m.n_halfedges, -1, np.int64)
    kept_edges = np.flatnonzero(~remove)
    new_id[2 * kept_edges] = 2 * np.arange(kept_edges.size)
    new_id[2 * kept_edges + 1] = 2 * np.arange(kept_edges.size) + 1
    nxt = _skip_removed(m.rot, keep_h)
    kept = np.flatnonzero(keep_h)
    rot = np.empty(kept.size, np.int64)
    rot[new_id[kept]] = new_id[nxt[kept]]
    org = np.empty(kept.size, np.int64)
    org[new_id[kept]] = m.org[kept]
    first_old = nxt[_prev_of(m.rot)[m.first]]
    if np.any(first_old < 0):
        raise MapError("edge deletion isolates a vertex")
    first = new_id[first_old]
    if np.any(first < 0):
        raise MapError("edge deletion isolates a vertex")
    root = new_id[m.root] if new_root is None else new_root
    if root < 0:
        raise MapError("root edge removed")
    return RootedMap(rot, org, first, int(root)), new_id


def _prev_of(rot: np.ndarray) -> np.ndarray:
    prev = np.empty_like(rot)
    prev[rot] = np.arange(rot.size)
    return prev


@numba.njit(cache=True)
def _skip_removed(rot, keep):
    """For each h, the first kept half-edge strictly after h in its rotation.

    One pass per rotation cycle; ``-1`` when the cycle has no kept half-edge.
    """
    n = rot.size
    out = np.full(n, -1, np.int64)
    seen = np.zeros(n, np.bool_)
    cyc = np.empty(n, np.int64)
    for h0 in range(n):
        if seen[h0]:
            continue
        L = 0
        h = h0
        while not seen[h]:
            seen[h] = True
            cyc[L] = h
            L += 1
            h = rot[h]
        nxt = -1
        for i in range(2 * L - 1, -1, -1):
            g = cyc[i % L]
            if i < L:
                out[g] = nxt
            if keep[g]:
                nxt = g
    return out


def submap(m: RootedMap, keep_edges: np.ndarray, root: int):
    """Restrict to a set of edges; vertices are those incident to kept edges.

    Rotations are inherited in cyclic order.  ``root`` is an old half-edge
    id.  Returns ``(map, vertex_ids, halfedge_new_id)`` where ``vertex_ids``
    lists the old vertex id of each new vertex.
    """
    keep_edges = np.asarray(keep_edges, dtype=bool)
    keep_h = np.repeat(keep_edges, 2)
    kept_edges = np.flatnonzero(keep_edges)
    new_h = np.full(m.n_halfedges, -1, np.int64)
    new_h[2 * kept_edges] = 2 * np.arange(kept_edges.size)
    new_h[2 * kept_edges + 1] = 2 * np.arange(kept_edges.size) + 1
    nxt = _skip_removed(m.rot, keep_h)
    kept = np.flatnonzero(keep_h)
    verts = np.unique(m.org[kept])
    new_v = np.full(m.n_vertices, -1, np.int64)
    new_v[verts] = np.arange(verts.size)
    rot = np.empty(kept.size, np.int64)
    rot[new_h[kept]] = new_h[nxt[kept]]
    org = np.empty(kept.size, np.int64)
    org[new_h[kept]] = new_v[m.org[kept]]
    first = np.full(verts.size, kept.size, np.int64)
    np.minimum.at(first, org, np.arange(kept.size, dtype=np.int64))
    return RootedMap(rot, org, first, int(new_h[root])), verts, new_h


def collapse_facial_2cycles(m: RootedMap) -> RootedMap:
    """Merge every run of parallel edges bounding 2-gon faces into one edge.

    From each run the edge with the smallest oriented-edge rank is kept, so
    the root edge always survives.  Idempotent.
    """
    return _collapse(m)[0]


def facial_2cycle_bundles(m: RootedMap) -> np.ndarray:
    """Label each edge by its run of parallel edges joined through 2-gons."""
    face = m.face_of
    deg = m.face_degrees()
    parent = np.arange(m.n_edges)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for h in np.flatnonzero(deg[face] == 2).tolist():
        g = int(m.rot[h ^ 1])
        a, b = find(h >> 1), find(g >> 1)
        if a != b:
            parent[max(a, b)] = min(a, b)
    return np.array([find(e) for e in range(m.n_edges)], dtype=np.int64)


def _collapse(m: RootedMap):
    bundle = facial_2cycle_bundles(m)
    rank = m.edge_rank
    erank = np.minimum(rank[0::2], rank[1::2])
    best = {}
    for e in np.argsort(erank, kind="stable").tolist():
        best.setdefault(int(bundle[e]), e)
    remove = np.ones(m.n_edges, dtype=bool)
    remove[list(best.values())] = False
    out, new_id = delete_edges(m, remove)
    return out, new_id, bundle


def mirror(m: RootedMap) -> RootedMap:
    """Reverse every rotation (orientation-reversed copy, same root)."""
    prev = _prev_of(m.rot)
    return RootedMap(prev, m.org.copy(), m.first.copy(), m.root)


# ---------------------------------------------------------------------------
# QND1 text format
# ---------------------------------------------------------------------------


def to_qnd(m: RootedMap) -> str:
    parts = [f"QND1 {m.n_vertices} {m.n_halfedges} {m.root}"]
    for v in range(m.n_vertices):
        parts.append(f"v{v}: " + ",".join(str(h) for h in m.rotation(v)))
    return " | ".join(parts)


def from_qnd(line: str, quadrangulation: bool = False) -> RootedMap:
    fields = [f.strip() for f in line.strip().split("|")]
    head = fields[0].split()
    if len(head) != 4 or head[0] != "QND1":
        raise MapError(f"not a QND1 record: {line[:40]!r}")
    nv, nh, root = (int(x) for x in head[1:])
    if len(fields) - 1 != nv:
        raise MapError(f"expected {nv} vertex fields, got {len(fields) - 1}")
    rotations = []
    for v, field in enumerate(fields[1:]):
        label, _, body = field.partition(":")
        if label.strip() != f"v{v}":
            raise MapError(f"vertex field {v} labelled {label!r}")
        rotations.append([int(x) for x in body.split(",")] if body.strip() else [])
    m = build_map(rotations, root, quadrangulation=quadrangulation)
    if m.n_halfedges != nh:
        raise MapError(f"header says {nh} half-edges, found {m.n_halfedges}")
    return m


def read_qnd(path) -> list[RootedMap]:
    with open(path, encoding="ascii") as fh:
        return [from_qnd(line) for line in fh if line.strip()]


def write_qnd(path, maps: Iterable[RootedMap]) -> int:
    n = 0
    with open(path, "w", encoding="ascii") as fh:
        for m in maps:
            fh.write(to_qnd(m) + "\n")
            n += 1
    return n


# ---------------------------------------------------------------------------
# small constructors
# ---------------------------------------------------------------------------


def single_edge() -> RootedMap:
    return build_map([[0], [1]], 0, quadrangulation=True)


def square() -> RootedMap:
    """The 4-cycle; root 0 -> 1."""
    # edges: 0:(0,1) 1:(1,2) 2:(2,3) 3:(3,0)
    return build_map([[0, 7], [2, 1], [4, 3], [6, 5]], 0, quadrangulation=True)


def path_map(k: int) -> RootedMap:
    """Path on ``k + 1`` vertices rooted at its first edge."""
    rots: list[list[int]] = [[0]]
    for i in range(1, k):
        rots.append([2 * i, 2 * i - 1])
    rots.append([2 * k - 1])
    return build_map(rots, 0)


# ---------------------------------------------------------------------------
# graph diameter
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _diameter(rot, org, first, nv):
    """Exact diameter by eccentricity bounds; returns (diameter, bfs_count)."""
    if nv <= 1:
        return 0, 0
    big = nv + 1
    lo = np.zeros(nv, np.int64)
    hi = np.full(nv, big, np.int64)
    alive = np.ones(nv, np.bool_)
    dl = 0
    bfs = 0
    pick_high = True
    while True:
        du = dl
        best = -1
        for w in range(nv):
            if alive[w]:
                if hi[w] <= dl or lo[w] == hi[w]:
                    alive[w] = False
                    continue
                if hi[w] > du:
                    du = hi[w]
        if du <= dl:
            return dl, bfs
        if pick_high:
            bv = -1
            for w in range(nv):
                if alive[w] and (best < 0 or hi[w] > bv or (hi[w] == bv and lo[w] > lo[best])):
                    best = w
                    bv = hi[w]
        else:
            bv = big + 1
            for w in range(nv):
                if alive[w] and (best < 0 or lo[w] < bv):
                    best = w
                    bv = lo[w]
        pick_high = not pick_high
        d = _graph_dist(rot, org, first, nv, best)
        bfs += 1
        e = d.max()
        if e > dl:
            dl = e
        alive[best] = False
        for w in range(nv):
            a = e - d[w]
            if d[w] > a:
                a = d[w]
            if a > lo[w]:
                lo[w] = a
            b = e + d[w]
            if b < hi[w]:
                hi[w] = b
            if lo[w] > dl:
                dl = lo[w]


def graph_diameter(m: RootedMap) -> int:
    """Exact graph diameter (edges counted as length 1)."""
    return int(_diameter(m.rot, m.org, m.first, m.n_vertices)[0])
