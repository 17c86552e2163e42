"""Exact uniform samplers for rooted quadrangulation families.

* ``sample_uniform_quadrangulation``: uniform plane tree (cycle lemma),
  uniform label increments and sign, then the pointed labeled-tree
  bijection.  Every rooted class has exactly ``n`` pointed preimages, so
  forgetting the pointed vertex leaves the uniform law on ``Q_n``.
* ``sample_two_connected``: rejection on the largest block of a uniform
  ``Q_n`` with ``n = floor(15 r / 7)``.
* ``sample_fixed_block``: the inverse gluing construction fed with a
  uniform root block, a uniform split vector, the conditioned allocation,
  uniform pendants and uniform corners.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .allocation import sample_N, sample_conditioned
from .decomposition import rebuild
from .enumeration import (
    RootBlockTooSmall,
    _tree_to_map,
    enumerate_quadrangulations,
    is_two_connected,
)
from .planar_map import RootedMap, _collapse, single_edge, submap

TWO_CONNECTED_ATTEMPTS = 10_000
ENUMERATED_BLOCKS_UP_TO = 7


class Timeout(RuntimeError):
    """Rejection sampling exhausted its attempt budget."""


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn(seed, count: int) -> list[np.random.SeedSequence]:
    """Independent child streams of a root seed (one per replica)."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return ss.spawn(count)


@dataclass
class SamplerConfig:
    seed: int = 0
    n: int | None = None
    r: int | None = None
    N: int | None = None
    max_attempts: int = TWO_CONNECTED_ATTEMPTS
    block_source: str = "auto"


@dataclass
class RejectionStats:
    attempts: list[int] = field(default_factory=list)

    @property
    def acceptance_rate(self) -> float:
        total = sum(self.attempts)
        return len(self.attempts) / total if total else float("nan")


# ---------------------------------------------------------------------------
# uniform Q_n
# ---------------------------------------------------------------------------


def random_dyck_word(k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform Dyck word of semilength ``k`` via the cycle lemma."""
    steps = np.concatenate((np.ones(k, np.int64), -np.ones(k + 1, np.int64)))
    rng.shuffle(steps)
    s = np.cumsum(steps)
    i = int(np.argmin(s))  # first minimum
    rolled = np.roll(steps, -(i + 1))
    return rolled[:-1].copy()


def sample_pointed_quadrangulation(n: int, seed=None) -> tuple[RootedMap, np.ndarray]:
    """Uniform pointed rooted quadrangulation and distances to the point."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = as_generator(seed)
    if n == 2:
        return single_edge(), np.array([0, 1], np.int64)
    k = n - 2
    steps = random_dyck_word(k, rng)
    inc = rng.integers(-1, 2, size=k).astype(np.int64)
    eps = 1 if rng.random() < 0.5 else -1
    rot, org, first, root, dist = _tree_to_map(steps, inc, eps)
    return RootedMap(rot, org, first, root), dist


def sample_uniform_quadrangulation(n: int, seed=None) -> RootedMap:
    return sample_pointed_quadrangulation(n, seed)[0]


# ---------------------------------------------------------------------------
# 2-connected quadrangulations
# ---------------------------------------------------------------------------


def block_sizes(q: RootedMap) -> tuple[np.ndarray, np.ndarray]:
    """Per-edge block label and number of vertices of each block."""
    block, nb, _ = q.blocks()
    ends = np.concatenate((q.org[0::2], q.org[1::2]))
    lab = np.concatenate((block, block))
    pairs = np.unique(lab * q.n_vertices + ends)
    return block, np.bincount(pairs // q.n_vertices, minlength=int(nb))


def largest_block(q: RootedMap) -> RootedMap:
    """Largest block, rooted at its minimal oriented edge, 2-gons collapsed.

    Ties go to the block containing the minimal oriented edge.
    """
    block, sizes = block_sizes(q)
    rank = q.edge_rank
    best = int(sizes.max())
    erank = np.minimum(rank[0::2], rank[1::2])
    cands = np.flatnonzero(sizes == best)
    b = min(cands.tolist(), key=lambda c: int(erank[block == c].min()))
    edges = block == b
    hs = np.flatnonzero(np.repeat(edges, 2))
    root = int(hs[np.argmin(rank[hs])])
    sub, _, _ = submap(q, edges, root)
    return _collapse(sub)[0]


@lru_cache(maxsize=None)
def _enumerated_blocks(r: int) -> tuple[RootedMap, ...]:
    return tuple(q for q in enumerate_quadrangulations(r) if is_two_connected(q))


def sample_two_connected(
    r: int,
    seed=None,
    max_attempts: int = TWO_CONNECTED_ATTEMPTS,
    stats: RejectionStats | None = None,
    source: str = "rejection",
) -> RootedMap:
    """Uniform element of ``R_r``.

    ``source="rejection"`` samples ``Q_n`` with ``n = floor(15 r / 7)`` until
    its largest block has ``r`` vertices; ``source="enumeration"`` picks
    uniformly from the exhaustive list (small ``r`` only).
    """
    if r < 4:
        raise RootBlockTooSmall(f"no 2-connected quadrangulation on {r} vertices")
    rng = as_generator(seed)
    if source == "enumeration":
        blocks = _enumerated_blocks(r)
        return blocks[int(rng.integers(len(blocks)))]
    if source != "rejection":
        raise ValueError(f"unknown source {source!r}")
    n = max(15 * r // 7, r)
    for attempt in range(1, max_attempts + 1):
        q = sample_uniform_quadrangulation(n, rng)
        _, sizes = block_sizes(q)
        if int(sizes.max()) == r:
            if stats is not None:
                stats.attempts.append(attempt)
            return largest_block(q)
    raise Timeout(f"no block of size {r} in {max_attempts} attempts at n={n}")


def _root_block(r: int, rng, source: str, max_attempts: int) -> RootedMap:
    if source == "auto":
        source = "enumeration" if r <= ENUMERATED_BLOCKS_UP_TO else "rejection"
    return sample_two_connected(r, rng, max_attempts=max_attempts, source=source)


# ---------------------------------------------------------------------------
# fixed root block
# ---------------------------------------------------------------------------


def random_split_vector(r: int, N: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Uniform ``m`` in ``N^(2r-3)`` with sum ``2r - 3 + N`` (stars and bars)."""
    parts = 2 * r - 3
    bars = np.sort(rng.choice(N + parts - 1, size=parts - 1, replace=False))
    cuts = np.concatenate(([-1], bars, [N + parts - 1]))
    return tuple(int(v) + 1 for v in np.diff(cuts) - 1)


def sample_parts(n: int, r: int, N: int, seed=None, source: str = "auto", max_attempts: int = TWO_CONNECTED_ATTEMPTS):
    """Random ``(R, m, submaps, corners, y)`` for the fixed-block family."""
    if r < 4:
        raise RootBlockTooSmall(f"no 2-connected quadrangulation on {r} vertices")
    if not 1 <= N <= n - r:
        raise ValueError("need 1 <= N <= n - r")
    rng = as_generator(seed)
    R = _root_block(r, rng, source, max_attempts)
    m = random_split_vector(r, N, rng)
    y = sample_conditioned(n - r, N, seed=rng)
    subs = [sample_uniform_quadrangulation(int(v) + 1, rng) for v in y]
    corners = rng.integers(0, 2, size=N).tolist()
    return R, m, subs, corners, tuple(int(v) for v in y)


def sample_fixed_block(n: int, r: int, N: int, seed=None, source: str = "auto", max_attempts: int = TWO_CONNECTED_ATTEMPTS) -> RootedMap:
    """Uniform element of ``Q_{n,r,N}``."""
    R, m, subs, corners, _ = sample_parts(n, r, N, seed, source, max_attempts)
    return rebuild(R, m, subs, corners)


def sample_conditioned_root_block(n: int, r: int, seed=None, source: str = "auto", max_attempts: int = TWO_CONNECTED_ATTEMPTS) -> RootedMap:
    """Uniform element of ``Q_{n,r}``: ``N`` from exact weights, then fixed block."""
    if r < 4:
        raise RootBlockTooSmall(f"no 2-connected quadrangulation on {r} vertices")
    if r >= n:
        raise ValueError("need r < n")
    rng = as_generator(seed)
    N = int(sample_N(n, r, rng))
    return sample_fixed_block(n, r, N, rng, source, max_attempts)


def sample_corpus(kind: str, reps: int, seed=0, **kw) -> list[RootedMap]:
    """``reps`` independent draws, one child stream per replica."""
    fn = {
        "uniform": lambda s: sample_uniform_quadrangulation(kw["n"], s),
        "two_connected": lambda s: sample_two_connected(kw["r"], s),
        "fixed_block": lambda s: sample_fixed_block(kw["n"], kw["r"], kw["N"], s),
        "root_block": lambda s: sample_conditioned_root_block(kw["n"], kw["r"], s),
    }[kind]
    return [fn(np.random.default_rng(s)) for s in spawn(seed, reps)]
