"""Exhaustive generation and exact counting of rooted quadrangulations.

Two independent generators are provided:

* ``labeled_tree_codes``: every plane tree with ``k`` edges, every label
  increment vector in ``{-1,0,1}^k`` and both root signs, sent through the
  labeled-tree (pointed) bijection.  Each rooted class is hit exactly
  ``k + 2`` times, once per pointed vertex; this multiplicity is asserted.
* ``face_gluing_codes``: squares glued one side at a time in breadth-first
  discovery order, only ever along a single boundary cycle, which keeps
  every partial surface planar.

All counts are Python integers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import comb
from typing import Iterator

import numba
import numpy as np

from .planar_map import RootedMap, canonical_code, is_two_connected, single_edge

DEFAULT_CAP = 11


class CapExceeded(ValueError):
    """Requested exhaustive enumeration beyond the configured size cap."""


class RootBlockTooSmall(ValueError):
    """No 2-connected quadrangulation with that many vertices exists."""


class BadAllocation(ValueError):
    """Allocation vector is not a composition of ``n - r`` into positive parts."""


class Family(str, Enum):
    all_quadrangulations = "all_quadrangulations"
    two_connected = "two_connected"
    fixed_root_block_size = "fixed_root_block_size"
    fixed_root_block_and_faces = "fixed_root_block_and_faces"


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    n: int
    r: int | None = None
    N: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.r is not None and not 1 <= self.r <= self.n:
            raise ValueError("need 1 <= r <= n")
        if self.N is not None:
            if self.r is None or not 1 <= self.N <= self.n - self.r:
                raise ValueError("need 1 <= N <= n - r")


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def tutte_count(faces: int) -> int:
    """Rooted planar quadrangulations with ``faces`` faces (``faces >= 1``)."""
    k = faces
    return 2 * 3**k * comb(2 * k, k) // ((k + 1) * (k + 2))


@lru_cache(maxsize=None)
def count_quadrangulations(n: int) -> int:
    """``|Q_n|``: rooted quadrangulations with ``n`` vertices; ``|Q_2| = 1``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if n == 2:
        return 1
    return tutte_count(n - 2)


# ---------------------------------------------------------------------------
# labeled-tree bijection
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _tree_to_map(steps, inc, eps):
    """Pointed labeled-tree bijection.

    ``steps`` is a Dyck word (+1/-1) of length ``2k``; ``inc[j]`` is the
    label increment on the edge into the ``(j+1)``-th vertex in preorder.
    Vertex ``k + 1`` is the pointed vertex.  Returns ``rot, org, first,
    root, dist`` where ``dist`` is the graph distance to the pointed vertex.
    """
    k2 = steps.size
    k = k2 // 2
    nv = k + 2
    cv = np.empty(k2, np.int64)
    lab = np.zeros(k + 1, np.int64)
    parent = np.zeros(k + 1, np.int64)
    cur = 0
    nxt = 1
    for i in range(k2):
        cv[i] = cur
        if steps[i] > 0:
            parent[nxt] = cur
            lab[nxt] = lab[cur] + inc[nxt - 1]
            cur = nxt
            nxt += 1
        else:
            cur = parent[cur]
    mn = lab.min()
    dist = np.zeros(nv, np.int64)
    for v in range(k + 1):
        dist[v] = lab[v] - mn + 1
    clab = np.empty(k2, np.int64)
    for i in range(k2):
        clab[i] = dist[cv[i]]
    maxl = clab.max()
    last = np.full(maxl + 2, -1, np.int64)
    succ = np.full(k2, -1, np.int64)
    for j in range(2 * k2 - 1, -1, -1):
        i = j % k2
        if j < k2:
            t = last[clab[i] - 1]
            succ[i] = t % k2 if t >= 0 else -1
        last[clab[i]] = j
    # arcs arriving at each corner, ordered by cyclic distance from it
    cnt = np.zeros(k2, np.int64)
    for c in range(k2):
        if succ[c] >= 0:
            cnt[succ[c]] += 1
    off = np.zeros(k2 + 1, np.int64)
    for c in range(k2):
        off[c + 1] = off[c] + cnt[c]
    fill = off[:-1].copy()
    arrivals = np.empty(off[k2], np.int64)
    for c2 in range(k2):
        t = succ[c2]
        if t >= 0 and c2 > t:
            arrivals[fill[t]] = c2
            fill[t] += 1
    for c2 in range(k2):
        t = succ[c2]
        if t >= 0 and c2 < t:
            arrivals[fill[t]] = c2
            fill[t] += 1
    h_count = 2 * k2
    deg = np.zeros(nv, np.int64)
    for c in range(k2):
        deg[cv[c]] += 1
        if succ[c] >= 0:
            deg[cv[succ[c]]] += 1
        else:
            deg[k + 1] += 1
    vstart = np.zeros(nv + 1, np.int64)
    for v in range(nv):
        vstart[v + 1] = vstart[v] + deg[v]
    fillv = vstart[:-1].copy()
    seq = np.empty(h_count, np.int64)
    for c in range(k2):
        v = cv[c]
        for q in range(off[c + 1] - 1, off[c] - 1, -1):
            seq[fillv[v]] = 2 * arrivals[q] + 1
            fillv[v] += 1
        seq[fillv[v]] = 2 * c
        fillv[v] += 1
    # the pointed vertex sees its arcs in reverse contour order
    top = vstart[k + 2] - 1
    for c in range(k2):
        if succ[c] < 0:
            seq[top] = 2 * c + 1
            top -= 1
    org = np.empty(h_count, np.int64)
    rot = np.empty(h_count, np.int64)
    first = np.empty(nv, np.int64)
    for v in range(nv):
        s0 = vstart[v]
        s1 = vstart[v + 1]
        first[v] = seq[s0]
        for q in range(s0, s1):
            h = seq[q]
            org[h] = v
            rot[h] = seq[q + 1] if q + 1 < s1 else seq[s0]
    root = 0 if eps > 0 else 1
    return rot, org, first, root, dist


@numba.njit(cache=True)
def _code_into(rot, org, nv, root, out):
    """Write the canonical code (same layout as ``canonical_code``)."""
    h_count = rot.size
    order = np.empty(nv, np.int64)
    pos = np.full(nv, -1, np.int64)
    start = np.full(nv, -1, np.int64)
    rank = np.full(h_count, -1, np.int64)
    eorder = np.empty(h_count, np.int64)
    u = org[root]
    order[0] = u
    pos[u] = 0
    start[u] = root
    tail = 1
    head = 0
    r = 0
    out[0] = nv
    out[1] = h_count
    while head < tail:
        v = order[head]
        head += 1
        h = start[v]
        d = 0
        while True:
            rank[h] = r
            eorder[r] = h
            r += 1
            d += 1
            w = org[h ^ 1]
            if pos[w] < 0:
                pos[w] = tail
                order[tail] = w
                tail += 1
                start[w] = h ^ 1
            h = rot[h]
            if h == start[v]:
                break
        out[2 + head - 1] = d
    for i in range(h_count):
        out[2 + nv + i] = rank[eorder[i] ^ 1]


@numba.njit(cache=True)
def _codes_for_tree(steps, incs):
    """Codes for one tree shape and all increment rows, both signs."""
    k = steps.size // 2
    length = 2 + (k + 2) + 4 * k
    out = np.empty((2 * incs.shape[0], length), np.int32)
    buf = np.empty(length, np.int64)
    row = 0
    for i in range(incs.shape[0]):
        for eps in (1, -1):
            rot, org, first, root, _ = _tree_to_map(steps, incs[i], eps)
            _code_into(rot, org, k + 2, root, buf)
            for j in range(length):
                out[row, j] = buf[j]
            row += 1
    return out


def tree_to_map(steps, inc, eps: int = 1) -> tuple[RootedMap, np.ndarray]:
    """Rooted quadrangulation and distances to the pointed vertex."""
    rot, org, first, root, dist = _tree_to_map(
        np.asarray(steps, np.int64), np.asarray(inc, np.int64), int(eps)
    )
    return RootedMap(rot, org, first, root), dist


def dyck_words(k: int) -> Iterator[np.ndarray]:
    """All Dyck words of semilength ``k`` in lexicographic order (+1 first)."""
    word = np.empty(2 * k, np.int64)

    def rec(i: int, height: int, ups: int):
        if i == 2 * k:
            yield word.copy()
            return
        if ups < k:
            word[i] = 1
            yield from rec(i + 1, height + 1, ups + 1)
        if height > 0:
            word[i] = -1
            yield from rec(i + 1, height - 1, ups)

    yield from rec(0, 0, 0)


def labeled_tree_codes(n: int) -> dict[bytes, int]:
    """Canonical code -> multiplicity over all labeled trees with ``n-2`` edges."""
    k = n - 2
    if k < 1:
        return {canonical_code(single_edge()): 1}
    incs = np.array(list(itertools.product((-1, 0, 1), repeat=k)), dtype=np.int64)
    counts: dict[bytes, int] = {}
    for w in dyck_words(k):
        codes = _codes_for_tree(w, incs)
        for row in codes:
            key = row.tobytes()
            counts[key] = counts.get(key, 0) + 1
    return counts


# ---------------------------------------------------------------------------
# face-gluing search
# ---------------------------------------------------------------------------


def face_gluing_codes(n: int) -> dict[bytes, int]:
    """Canonical code -> number of times produced by the gluing search."""
    k = n - 2
    if k < 1:
        return {canonical_code(single_edge()): 1}
    size = 4 * k
    alpha = [-1] * size
    colour = [0] * size
    found: dict[bytes, int] = {}

    def phi(s: int) -> int:
        return s - s % 4 + (s + 1) % 4

    def bnext(s: int) -> int:
        x = phi(s)
        while alpha[x] >= 0:
            x = phi(alpha[x])
        return x

    def add_face(f: int, c0: int):
        for i in range(4):
            colour[4 * f + i] = (c0 + i) % 2

    def emit(nfaces: int):
        sides = 4 * nfaces
        rot = np.empty(sides, np.int64)
        edge_of = {}
        new = np.empty(sides, np.int64)
        ne = 0
        for s in range(sides):
            if s not in edge_of:
                t = alpha[s]
                edge_of[s] = edge_of[t] = ne
                new[s], new[t] = 2 * ne, 2 * ne + 1
                ne += 1
        for x in range(sides):
            rot[new[x]] = new[phi(alpha[x])]
        org = np.full(sides, -1, np.int64)
        nv = 0
        firsts = []
        for h in range(sides):
            if org[h] < 0:
                firsts.append(h)
                g = h
                while org[g] < 0:
                    org[g] = nv
                    g = int(rot[g])
                nv += 1
        if nv != k + 2:
            raise AssertionError("gluing search produced a non-planar surface")
        m = RootedMap(rot, org, np.array(firsts, np.int64), int(new[0]))
        code = canonical_code(m)
        found[code] = found.get(code, 0) + 1

    def rec(nfaces: int, lo: int):
        h = lo
        while h < 4 * nfaces and alpha[h] >= 0:
            h += 1
        if h == 4 * nfaces:
            if nfaces == k:
                emit(nfaces)
            return
        if nfaces < k:
            f = nfaces
            add_face(f, (colour[h] + 1) % 2)
            alpha[h], alpha[4 * f] = 4 * f, h
            rec(nfaces + 1, h + 1)
            alpha[h] = alpha[4 * f] = -1
        want = (colour[h] + 1) % 2
        t = bnext(h)
        while t != h:
            nt = bnext(t)
            if colour[t] == want:
                alpha[h], alpha[t] = t, h
                rec(nfaces, h + 1)
                alpha[h] = alpha[t] = -1
            t = nt

    add_face(0, 0)
    rec(1, 0)
    return found


# ---------------------------------------------------------------------------
# decoding and family streams
# ---------------------------------------------------------------------------


def map_from_code(code: bytes) -> RootedMap:
    """Rebuild the canonical representative of a canonical code."""
    a = np.frombuffer(code, dtype=np.int32).astype(np.int64)
    nv, h_count = int(a[0]), int(a[1])
    deg = a[2 : 2 + nv]
    twin_rank = a[2 + nv : 2 + nv + h_count]
    # ranks -> half-edge ids with paired twins, edges by first appearance
    new_id = np.full(h_count, -1, np.int64)
    ne = 0
    for r in range(h_count):
        if new_id[r] < 0:
            new_id[r] = 2 * ne
            new_id[twin_rank[r]] = 2 * ne + 1
            ne += 1
    rot = np.empty(h_count, np.int64)
    org = np.empty(h_count, np.int64)
    first = np.empty(nv, np.int64)
    off = 0
    for v in range(nv):
        d = int(deg[v])
        ids = new_id[off : off + d]
        rot[ids] = np.roll(ids, -1)
        org[ids] = v
        first[v] = ids[0]
        off += d
    return RootedMap(rot, org, first, int(new_id[0]))


@lru_cache(maxsize=None)
def _all_codes(n: int) -> tuple[bytes, ...]:
    counts = labeled_tree_codes(n)
    mult = 1 if n == 2 else n
    bad = [c for c, v in counts.items() if v != mult]
    if bad:
        raise AssertionError(f"{len(bad)} classes with wrong multiplicity at n={n}")
    return tuple(counts)


def _check_cap(n: int, cap: int):
    if n > cap:
        raise CapExceeded(f"n={n} exceeds enumeration cap {cap}")


def enumerate_quadrangulations(n: int, cap: int = DEFAULT_CAP) -> Iterator[RootedMap]:
    _check_cap(n, cap)
    for code in _all_codes(n):
        yield map_from_code(code)


@lru_cache(maxsize=None)
def _decomposed(n: int):
    from .decomposition import decompose

    out = []
    for code in _all_codes(n):
        q = map_from_code(code)
        out.append((q, decompose(q)))
    return tuple(out)


def enumerate_family(spec: FamilySpec, cap: int = DEFAULT_CAP) -> Iterator[RootedMap]:
    """Each rooted class of the family exactly once, in a fixed order."""
    _check_cap(spec.n, cap)
    if spec.family == Family.all_quadrangulations:
        yield from enumerate_quadrangulations(spec.n, cap)
    elif spec.family == Family.two_connected:
        for q in enumerate_quadrangulations(spec.n, cap):
            if is_two_connected(q):
                yield q
    elif spec.family == Family.fixed_root_block_size:
        for q, d in _decomposed(spec.n):
            if d.r == spec.r:
                yield q
    else:
        for q, d in _decomposed(spec.n):
            if d.r == spec.r and d.N == spec.N:
                yield q


enumerate = enumerate_family  # noqa: A001


# ---------------------------------------------------------------------------
# exact counts for the fixed-root-block families
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def count_two_connected(r: int, cap: int = DEFAULT_CAP) -> int:
    """``|R_r|`` by filtered enumeration."""
    if r < 4:
        if r >= 2:
            return 0
        raise RootBlockTooSmall("r must be at least 2")
    _check_cap(r, cap)
    return sum(1 for q in enumerate_quadrangulations(r, cap) if is_two_connected(q))


@lru_cache(maxsize=None)
def composition_weight(m: int, N: int) -> int:
    """``sum over y in B_{m,N} of prod |Q_{y_i+1}|`` by convolution."""
    if N < 0 or m < N:
        return 0
    if N == 0:
        return 1 if m == 0 else 0
    row = [0] * (m + 1)
    row[0] = 1
    a = [0] + [count_quadrangulations(y + 1) for y in range(1, m + 1)]
    for _ in range(N):
        new = [0] * (m + 1)
        for s in range(m + 1):
            val = row[s]
            if val:
                for y in range(1, m - s + 1):
                    new[s + y] += val * a[y]
        row = new
    return row[m]


def _block_factor(n: int, r: int, N: int, cap: int) -> int:
    if r < 4:
        raise RootBlockTooSmall(f"no 2-connected quadrangulation on {r} vertices")
    return count_two_connected(r, cap) * comb(2 * r - 4 + N, N) * 2**N


def count_fixed_block(n: int, r: int, N: int, cap: int = DEFAULT_CAP) -> int:
    """``|Q_{n,r,N}|``."""
    factor = _block_factor(n, r, N, cap)
    if N < 1 or N > n - r:
        return 0
    return factor * composition_weight(n - r, N)


def lambda_count(n: int, r: int, N: int, y, cap: int = DEFAULT_CAP) -> int:
    """Number of maps in ``Q_{n,r,N}`` whose pendant sizes are exactly ``y``."""
    y = tuple(int(v) for v in y)
    if len(y) != N or any(v < 1 for v in y) or sum(y) != n - r:
        raise BadAllocation(f"{y} is not in B_({n - r},{N})")
    out = _block_factor(n, r, N, cap)
    for v in y:
        out *= count_quadrangulations(v + 1)
    return out


def compositions(m: int, N: int) -> Iterator[tuple[int, ...]]:
    """All ``y`` in ``N^N`` with positive entries summing to ``m``."""
    if N == 0:
        if m == 0:
            yield ()
        return
    for cut in itertools.combinations(range(1, m), N - 1):
        bounds = (0,) + cut + (m,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(N))


@dataclass
class CountTable:
    """Exact counts keyed by family parameters."""

    entries: dict

    @classmethod
    def from_enumeration(cls, n: int, cap: int = DEFAULT_CAP) -> "CountTable":
        table: dict = {("all", n): 0}
        for _, d in _decomposed(n):
            table[("all", n)] += 1
            table[("r", n, d.r)] = table.get(("r", n, d.r), 0) + 1
            key = ("rN", n, d.r, d.N)
            table[key] = table.get(key, 0) + 1
            ykey = ("rNy", n, d.r, d.N, tuple(d.Y))
            table[ykey] = table.get(ykey, 0) + 1
        return cls(table)

    def get(self, *key) -> int:
        return self.entries.get(tuple(key), 0)
