"""Root block, pendant submaps and the inverse gluing construction.

The pre-root-block is the block of the root edge (vertex set maximal with a
2-connected induced submap).  Its 2-gon faces each hold exactly one
pendant submap hanging from one of the two corners.  Collapsing the 2-gons
gives the root block.

Conventions fixed here and shared by :func:`decompose` and :func:`rebuild`:

* root-block edges ``e_1, e_2, ...`` are oriented from the earlier to the
  later explored endpoint and listed by the oriented-edge order of the root
  block; ``e_1`` is the root;
* copies of an edge are listed clockwise at its tail; ``ell_0`` counts the
  copies of ``e_1`` clockwise before the root, ``ell_1`` those after it;
* corner ``0`` ("left") is the tail of the enclosing pair of copies,
  corner ``1`` ("right") its head;
* a pendant on ``k >= 3`` vertices is a quadrangulation ``Q_i`` whose root
  edge is doubled; the extra copy closes the corner clockwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from .planar_map import (
    RootedMap,
    _collapse,
    _diameter,
    canonical_code,
    graph_diameter,
    is_two_connected,
    single_edge,
    submap,
)


class BadSplitVector(ValueError):
    """Split vector has the wrong length, a zero entry or the wrong sum."""


class BadCornerChoice(ValueError):
    """Corner choices must be 0/1 (or 'left'/'right'), one per submap."""


class DecompositionError(RuntimeError):
    """An internal consistency check failed while decomposing."""


@numba.njit(cache=True)
def _corner_runs(rot, org, first, bvert, bhalf):
    """Maximal runs of non-block half-edges at block vertices.

    Returns ``(vertex, start, length, before, after)`` arrays: the run sits
    clockwise after block half-edge ``before`` and before ``after``.
    """
    nv = bvert.size
    cap = rot.size
    vx = np.empty(cap, np.int64)
    st = np.empty(cap, np.int64)
    ln = np.empty(cap, np.int64)
    bf = np.empty(cap, np.int64)
    af = np.empty(cap, np.int64)
    k = 0
    for x in range(nv):
        if not bvert[x]:
            continue
        s = first[x]
        guard = 0
        while not bhalf[s]:
            s = rot[s]
            guard += 1
        h = s
        while True:
            g = rot[h]
            if not bhalf[g]:
                vx[k] = x
                st[k] = g
                bf[k] = h
                c = 0
                while not bhalf[g]:
                    c += 1
                    g = rot[g]
                ln[k] = c
                af[k] = g
                k += 1
            h = g
            if h == s:
                break
    return vx[:k], st[:k], ln[:k], bf[:k], af[:k]


@numba.njit(cache=True)
def _flood_runs(rot, org, first, bvert, run_start, run_len):
    """Label every non-block vertex by the run whose corner it hangs from."""
    nv = bvert.size
    comp = np.full(nv, -1, np.int64)
    queue = np.empty(nv, np.int64)
    for j in range(run_start.size):
        g = run_start[j]
        for _ in range(run_len[j]):
            w = org[g ^ 1]
            if comp[w] < 0 and not bvert[w]:
                comp[w] = j
                queue[0] = w
                tail = 1
                head = 0
                while head < tail:
                    v = queue[head]
                    head += 1
                    h0 = first[v]
                    h = h0
                    while True:
                        u = org[h ^ 1]
                        if not bvert[u]:
                            if comp[u] < 0:
                                comp[u] = j
                                queue[tail] = u
                                tail += 1
                            elif comp[u] != j:
                                return comp, False
                        h = rot[h]
                        if h == h0:
                            break
            elif comp[w] >= 0 and comp[w] != j:
                return comp, False
            g = rot[g]
    return comp, True


def _extract(q: RootedMap, edges: np.ndarray, corner_halfedges: np.ndarray, x: int) -> RootedMap:
    """Submap on ``edges``; at vertex ``x`` only ``corner_halfedges`` are kept."""
    hs = np.empty(2 * edges.size, np.int64)
    hs[0::2] = 2 * edges
    hs[1::2] = 2 * edges + 1
    new_h = {int(h): i for i, h in enumerate(hs.tolist())}
    rot = np.empty(hs.size, np.int64)
    at_x = q.org[hs] == x
    for i, h in enumerate(hs.tolist()):
        if not at_x[i]:
            g = int(q.rot[h])
            while g not in new_h:
                g = int(q.rot[g])
            rot[i] = new_h[g]
    ch = corner_halfedges.tolist()
    for j, h in enumerate(ch):
        rot[new_h[h]] = new_h[ch[(j + 1) % len(ch)]]
    verts, inv = np.unique(q.org[hs], return_inverse=True)
    org = inv.astype(np.int64)
    first = np.full(verts.size, hs.size, np.int64)
    np.minimum.at(first, org, np.arange(hs.size, dtype=np.int64))
    return RootedMap(rot, org, first, new_h[ch[0]])


@dataclass(frozen=True)
class Pendant:
    """One pendant submap ``P_i``.

    ``vertex`` is its attachment vertex in the decomposed map, ``corner``
    is 0 when attached at the tail of the enclosing copies, 1 at the head;
    ``bundle`` is the index ``i >= 1`` of the enclosing root-block edge.
    """

    index: int
    vertex: int
    corner: int
    bundle: int
    size: int
    root_rank: int
    edges: np.ndarray = field(repr=False)
    corner_halfedges: np.ndarray = field(repr=False)
    host: RootedMap = field(repr=False)

    @property
    def submap(self) -> RootedMap:
        return _extract(self.host, self.edges, self.corner_halfedges, self.vertex)

    @property
    def core(self) -> RootedMap:
        """The quadrangulation ``Q_i`` (the pendant without its doubling edge)."""
        if self.size == 1:
            return single_edge()
        ch = self.corner_halfedges
        last = int(ch[-1])
        if self.host.org[last ^ 1] != self.host.org[int(ch[0]) ^ 1]:
            raise DecompositionError("closing edge of a pendant is not a doubled root")
        keep = self.edges[self.edges != last >> 1]
        return _extract(self.host, keep, ch[:-1], self.vertex)

    @property
    def diameter(self) -> int:
        return graph_diameter(self.submap)


@dataclass(frozen=True)
class BlockDecomposition:
    q: RootedMap = field(repr=False)
    n: int
    r: int
    N: int
    Y: tuple[int, ...]
    ell: tuple[int, ...]
    largest_index: int | None
    rho: int | None
    block_vertices: np.ndarray = field(repr=False)
    pendants: tuple[Pendant, ...] = field(repr=False)
    pre_root_block: RootedMap = field(repr=False)
    root_block: RootedMap = field(repr=False)
    bundle_copies: tuple[tuple[int, ...], ...] = field(repr=False)
    pendant_label: np.ndarray = field(repr=False)

    @property
    def regular(self) -> bool:
        """True when the root block has at least 4 vertices."""
        return self.r >= 4

    @property
    def C(self) -> dict[int, int]:
        """``|C_v|`` for each root-block vertex (ids of the decomposed map)."""
        out = {int(v): 1 for v in self.block_vertices.tolist()}
        for p in self.pendants:
            if p.index != self.largest_index:
                out[p.vertex] += p.size
        return out

    @property
    def r_plus_vertices(self) -> np.ndarray:
        if self.largest_index is None:
            return np.arange(self.n)
        return np.flatnonzero(self.pendant_label != self.largest_index)

    def r_plus(self) -> tuple[RootedMap, np.ndarray]:
        """``R^+`` and the original ids of its vertices."""
        if self.largest_index is None:
            return self.q, np.arange(self.n)
        el = self.edge_labels()
        m, verts, _ = submap(self.q, el != self.largest_index, self.q.root)
        return m, verts

    def largest(self) -> Pendant | None:
        if self.largest_index is None:
            return None
        return self.pendants[self.largest_index]

    def edge_labels(self) -> np.ndarray:
        lab = self.pendant_label
        return np.maximum(lab[self.q.org[0::2]], lab[self.q.org[1::2]])

    def parts(self):
        """``(root_block, split_vector, submaps, corners)`` for :func:`rebuild`."""
        m = tuple(v + 1 for v in self.ell)
        return self.root_block, m, [p.core for p in self.pendants], [p.corner for p in self.pendants]

    def to_record(self, diameters: bool = True) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "N": self.N,
            "Y": list(self.Y),
            "ell": list(self.ell),
            "rho": self.rho,
            "diam": [p.diameter for p in self.pendants] if diameters else None,
        }


def _oriented_block_edges(R: RootedMap) -> list[int]:
    """Root-block half-edges oriented earlier -> later, in oriented-edge order."""
    pos = R.vertex_position
    rank = R.edge_rank
    out = []
    for e in range(R.n_edges):
        h = 2 * e if pos[R.org[2 * e]] < pos[R.org[2 * e + 1]] else 2 * e + 1
        out.append(h)
    out.sort(key=lambda h: rank[h])
    return out


def _clockwise_run(m: RootedMap, members: set[int]) -> list[int]:
    """Order a contiguous set of half-edges at one vertex clockwise."""
    start = None
    for h in members:
        p = _prev(m, h)
        if p not in members:
            start = h
            break
    if start is None:
        raise DecompositionError("bundle fills a whole rotation")
    out = [start]
    g = int(m.rot[start])
    while g in members:
        out.append(g)
        g = int(m.rot[g])
    if len(out) != len(members):
        raise DecompositionError("bundle copies are not contiguous")
    return out


def _prev(m: RootedMap, h: int) -> int:
    g = h
    while True:
        n = int(m.rot[g])
        if n == h:
            return g
        g = n


def decompose(q: RootedMap) -> BlockDecomposition:
    """Decompose a rooted quadrangulation around its root block."""
    n = q.n_vertices
    rank = q.edge_rank
    pos = q.vertex_position
    block, _, _ = q.blocks()
    bedge = block == block[q.root >> 1]
    bhalf = np.repeat(bedge, 2)
    bverts = np.unique(q.org[bhalf])
    bvert = np.zeros(n, dtype=bool)
    bvert[bverts] = True
    r = int(bverts.size)

    P, pverts, p_new = submap(q, bedge, q.root)
    p_old = np.flatnonzero(bhalf)  # p half-edge i  <->  q half-edge p_old[i]
    R, r_new, bundle = _collapse(P)

    # split multiplicities
    ell: list[int] = []
    copies_per_edge: list[tuple[int, ...]] = []
    if r >= 4:
        oriented = _oriented_block_edges(R)
        if len(oriented) != 2 * r - 4:
            raise DecompositionError(f"root block has {len(oriented)} edges, expected {2 * r - 4}")
        kept = np.flatnonzero(r_new[0::2] >= 0)
        p_edge_of_r = np.empty(R.n_edges, np.int64)
        p_edge_of_r[r_new[2 * kept] // 2] = kept
        members_of: dict[int, list[int]] = {}
        for e in range(P.n_edges):
            members_of.setdefault(int(bundle[e]), []).append(e)
        p_root = int(p_new[q.root])
        for i, h in enumerate(oriented):
            pe = int(p_edge_of_r[h >> 1])
            tail = int(R.org[h])
            hs = set()
            for e in members_of[int(bundle[pe])]:
                hs.add(2 * e if P.org[2 * e] == tail else 2 * e + 1)
            run = _clockwise_run(P, hs)
            copies_per_edge.append(tuple(int(p_old[g]) for g in run))
            if i == 0:
                j = run.index(p_root)
                ell.extend([j, len(run) - 1 - j])
            else:
                ell.append(len(run) - 1)

    # pendants hang in the corners between block half-edges
    vx, st, ln, bf, af = _corner_runs(q.rot, q.org, q.first, bvert, bhalf)
    comp, ok = _flood_runs(q.rot, q.org, q.first, bvert, st, ln)
    if not ok:
        raise DecompositionError("a pendant component touches two corners")
    erank = np.minimum(rank[0::2], rank[1::2])
    keys = []
    for j in range(vx.size):
        a, b = int(erank[bf[j] >> 1]), int(erank[af[j] >> 1])
        other = int(q.org[int(bf[j]) ^ 1])
        corner = 0 if pos[vx[j]] < pos[other] else 1
        keys.append((min(a, b), max(a, b), corner, j))
    keys.sort()
    order = [k[3] for k in keys]
    relabel = np.full(max(vx.size, 1), -1, np.int64)
    relabel[order] = np.arange(len(order))
    label = np.where(comp >= 0, relabel[np.maximum(comp, 0)], -1)

    sizes = np.bincount(label[label >= 0], minlength=len(order))
    edge_lab = np.maximum(label[q.org[0::2]], label[q.org[1::2]])
    by_label = np.argsort(edge_lab, kind="stable")
    counts = np.bincount(edge_lab[edge_lab >= 0], minlength=len(order))
    offsets = np.concatenate(([0], np.cumsum(counts))) + int(np.sum(edge_lab < 0))

    bundle_index = {}
    for i, cps in enumerate(copies_per_edge):
        for h in cps:
            bundle_index[h >> 1] = i + 1

    pendants = []
    for i, j in enumerate(order):
        hs = []
        g = int(st[j])
        for _ in range(int(ln[j])):
            hs.append(g)
            g = int(q.rot[g])
        x = int(vx[j])
        other = int(q.org[int(bf[j]) ^ 1])
        pendants.append(
            Pendant(
                index=i,
                vertex=x,
                corner=0 if pos[x] < pos[other] else 1,
                bundle=bundle_index.get(int(bf[j]) >> 1, 0),
                size=int(sizes[i]),
                root_rank=int(rank[hs[0]]),
                edges=by_label[offsets[i] : offsets[i + 1]],
                corner_halfedges=np.array(hs, np.int64),
                host=q,
            )
        )

    Y = tuple(int(s) for s in sizes.tolist()) if pendants else ()
    largest = None
    rho = None
    if pendants:
        best = max(Y)
        cands = [p for p in pendants if p.size == best]
        largest = min(cands, key=lambda p: p.root_rank).index
        rho = pendants[largest].vertex
    if r >= 4 and len(pendants) != sum(ell):
        raise DecompositionError(f"{len(pendants)} pendants but {sum(ell)} facial 2-cycles")
    if sum(Y) != n - r:
        raise DecompositionError("pendant sizes do not add up to n - r")
    return BlockDecomposition(
        q=q,
        n=n,
        r=r,
        N=len(pendants),
        Y=Y,
        ell=tuple(ell),
        largest_index=largest,
        rho=rho,
        block_vertices=bverts,
        pendants=tuple(pendants),
        pre_root_block=P,
        root_block=R,
        bundle_copies=tuple(copies_per_edge),
        pendant_label=label,
    )


# ---------------------------------------------------------------------------
# inverse construction
# ---------------------------------------------------------------------------


def _corner_value(c) -> int:
    if c in (0, "left", "l", "L"):
        return 0
    if c in (1, "right", "r", "R"):
        return 1
    raise BadCornerChoice(f"corner choice {c!r} is not left/right")


def split_root_block(R: RootedMap, m: Sequence[int]):
    """Split the edges of ``R`` according to ``m`` and re-root.

    Returns the split map and the list of 2-gon faces as
    ``(key, tail_insert, head_insert, bundle)`` where the inserts are the
    half-edges after which a pendant would be spliced, at the tail and the
    head respectively.
    """
    r = R.n_vertices
    oriented = _oriented_block_edges(R)
    E = len(oriented)
    if len(m) != E + 1:
        raise BadSplitVector(f"split vector needs {E + 1} entries, got {len(m)}")
    if any(int(v) < 1 for v in m):
        raise BadSplitVector("split entries must be positive")
    counts = [int(m[0]) + int(m[1]) - 1] + [int(v) for v in m[2:]]
    rotations = [list(R.rotation(v)) for v in range(r)]
    repl: dict[int, list[int]] = {}
    copies: list[list[int]] = []
    ne = 0
    for i, h in enumerate(oriented):
        cs = list(range(2 * ne, 2 * (ne + counts[i]), 2))
        ne += counts[i]
        copies.append(cs)
        repl[h] = cs
        repl[h ^ 1] = [c ^ 1 for c in reversed(cs)]
    new_rot = [[g for h in rot for g in repl[h]] for rot in rotations]
    root = copies[0][int(m[0]) - 1]
    from .planar_map import build_map

    P = build_map(new_rot, root)
    prank = P.edge_rank
    erank = np.minimum(prank[0::2], prank[1::2])
    faces = []
    for i, cs in enumerate(copies):
        for t in range(len(cs) - 1):
            a, b = int(erank[cs[t] >> 1]), int(erank[cs[t + 1] >> 1])
            faces.append(((min(a, b), max(a, b)), cs[t], cs[t + 1] ^ 1, i + 1))
    faces.sort()
    return P, faces


def rebuild(
    root_block: RootedMap,
    split: Sequence[int],
    submaps: Sequence[RootedMap],
    corners: Sequence,
) -> RootedMap:
    """Glue pendant quadrangulations into a split root block.

    ``submaps[i]`` goes into the ``i``-th 2-gon face in canonical order,
    hanging from corner ``corners[i]``.
    """
    N = len(submaps)
    if len(corners) != N:
        raise BadCornerChoice("one corner choice per submap is required")
    cv = [_corner_value(c) for c in corners]
    r = root_block.n_vertices
    if sum(int(v) for v in split) != 2 * r - 4 + 1 + N:
        raise BadSplitVector(
            f"split vector sums to {sum(split)}, expected {2 * r - 4 + 1 + N}"
        )
    P, faces = split_root_block(root_block, split)
    if len(faces) != N:
        raise BadSplitVector(f"{len(faces)} faces for {N} submaps")
    rot_parts = [P.rot.copy()]
    org_parts = [P.org.copy()]
    base_h = P.n_halfedges
    base_v = P.n_vertices
    splices = []
    for (key, tail_ins, head_ins, _), sub, c in zip(faces, submaps, cv):
        x = tail_ins if c == 0 else head_ins
        v = int(P.org[x])
        h_r = base_h + sub.root
        u = sub.org[sub.root]
        vmap = np.empty(sub.n_vertices, np.int64)
        others = np.flatnonzero(np.arange(sub.n_vertices) != u)
        vmap[others] = base_v + np.arange(others.size)
        vmap[u] = v
        rot_parts.append(sub.rot + base_h)
        org_parts.append(vmap[sub.org])
        base_v += others.size
        base_h += sub.n_halfedges
        if sub.n_vertices >= 3:
            h_new = base_h
            rot_parts.append(np.array([-1, -1], np.int64))
            org_parts.append(np.array([v, vmap[sub.org[sub.root ^ 1]]], np.int64))
            base_h += 2
        else:
            h_new = -1
        splices.append((x, h_r, h_new))
    rot = np.concatenate(rot_parts)
    org = np.concatenate(org_parts)
    for x, h_r, h_new in splices:
        y = int(rot[x])
        # last half-edge of the submap's rotation before its root
        g = h_r
        while int(rot[g]) != h_r:
            g = int(rot[g])
        rot[x] = h_r
        if h_new < 0:
            rot[g] = y
        else:
            rot[g] = h_new
            rot[h_new] = y
            t = h_r ^ 1
            z = int(rot[t])
            rot[t] = h_new ^ 1
            rot[h_new ^ 1] = z
    first = np.full(base_v, rot.size, np.int64)
    np.minimum.at(first, org, np.arange(rot.size, dtype=np.int64))
    return RootedMap(rot, org, first, P.root)


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PendantStatistics:
    Y1: int
    Y2: int
    max_pendant_diameter: int
    max_ell: int
    max_root_block_degree: int
    max_C: int


def pendant_statistics(d: BlockDecomposition, diameters: bool = True) -> PendantStatistics:
    ys = sorted(d.Y, reverse=True)
    diam = max((p.diameter for p in d.pendants), default=0) if diameters else 0
    deg = d.root_block.degrees() if d.r >= 2 else np.zeros(1, np.int64)
    C = d.C
    return PendantStatistics(
        Y1=ys[0] if ys else 0,
        Y2=ys[1] if len(ys) > 1 else 0,
        max_pendant_diameter=int(diam),
        max_ell=max(d.ell, default=0),
        max_root_block_degree=int(deg.max()) if d.pendants or d.r >= 4 else 0,
        max_C=max(C.values()) if d.pendants else 0,
    )


def parts_key(parts) -> tuple:
    """Hashable identity of a parts tuple (codes instead of maps)."""
    R, m, subs, corners = parts
    return (
        canonical_code(R),
        tuple(int(v) for v in m),
        tuple(canonical_code(s) for s in subs),
        tuple(_corner_value(c) for c in corners),
    )


__all__ = [
    "BadCornerChoice",
    "BadSplitVector",
    "BlockDecomposition",
    "DecompositionError",
    "Pendant",
    "PendantStatistics",
    "decompose",
    "is_two_connected",
    "parts_key",
    "pendant_statistics",
    "rebuild",
    "split_root_block",
]
