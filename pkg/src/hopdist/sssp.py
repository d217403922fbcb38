"""Exact BFS hop distances from landmarks, plus a brute-force verification oracle.

Distances are uint32 hop counts; the sentinel for unreachable nodes is the
uint32 maximum, exposed as UNREACHABLE.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np
from numba import njit

from .errors import ConfigError
from .graph import Graph

UNREACHABLE = np.uint32(np.iinfo(np.uint32).max)

ALL_PAIRS_GUARD = 2000  # refuse accidental O(n^2) runs above this


@dataclass(frozen=True)
class LandmarkSet:
    nodes: np.ndarray  # distinct node indices, in draw order
    strategy: str  # "uniform" | "degree"
    seed: int

    def __len__(self) -> int:
        return len(self.nodes)


@njit(cache=True)
def _bfs_fill(indptr, indices, source, dist, queue):
    dist[source] = np.uint32(0)
    queue[0] = source
    head, tail = 0, 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u]
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if dist[w] == UNREACHABLE:
                dist[w] = du + np.uint32(1)
                queue[tail] = w
                tail += 1
    return tail


@njit(cache=True)
def _bfs_parents_fill(indptr, indices, source, dist, parent, queue):
    # identical traversal to _bfs_fill, additionally recording the BFS tree
    dist[source] = np.uint32(0)
    parent[source] = -1
    queue[0] = source
    head, tail = 0, 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u]
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if dist[w] == UNREACHABLE:
                dist[w] = du + np.uint32(1)
                parent[w] = u
                queue[tail] = w
                tail += 1
    return tail


def bfs(g: Graph, source: int) -> np.ndarray:
    """Exact hop counts from source to every node; UNREACHABLE where no path.

    dist[source] == 0; runs in O(n + m).
    """
    g._check_node(source)
    n = g.node_count
    dist = np.full(n, UNREACHABLE, dtype=np.uint32)
    queue = np.empty(n, dtype=np.int64)
    _bfs_fill(g.indptr, g.indices, source, dist, queue)
    return dist


def bfs_with_parents(g: Graph, source: int) -> tuple[np.ndarray, np.ndarray]:
    """BFS distances plus the BFS-tree parent of each reached node (-1 at root
    and at unreached nodes)."""
    g._check_node(source)
    n = g.node_count
    dist = np.full(n, UNREACHABLE, dtype=np.uint32)
    parent = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    _bfs_parents_fill(g.indptr, g.indices, source, dist, parent, queue)
    return dist, parent


def select_landmarks(
    g: Graph, l: int, strategy: str = "uniform", seed: int = 0
) -> LandmarkSet:
    """Pick l distinct landmark nodes.

    "uniform" draws without replacement from a seeded generator; "degree"
    takes the l largest-degree nodes, ties broken by smaller index.
    """
    n = g.node_count
    if not 1 <= l < n:
        raise ConfigError(f"landmark count l={l} must satisfy 1 <= l < n={n}")
    if strategy == "uniform":
        rng = np.random.default_rng(seed)
        nodes = rng.choice(n, size=l, replace=False)
    elif strategy == "degree":
        order = np.lexsort((np.arange(n), -g.degrees()))
        nodes = order[:l]
    else:
        raise ConfigError(f"unknown landmark strategy {strategy!r}")
    return LandmarkSet(nodes=nodes.astype(np.int64), strategy=strategy, seed=seed)


def all_pairs_oracle(g: Graph, force: bool = False) -> np.ndarray:
    """Exact all-pairs hop distances via repeated BFS. Test/verification only.

    Refuses n > ALL_PAIRS_GUARD unless force=True.
    """
    n = g.node_count
    if n > ALL_PAIRS_GUARD and not force:
        raise ConfigError(
            f"all_pairs_oracle guard: n={n} > {ALL_PAIRS_GUARD}; pass force=True to override"
        )
    out = np.full((n, n), UNREACHABLE, dtype=np.uint32)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        _bfs_fill(g.indptr, g.indices, s, out[s], queue)
    return out


def dump_distances(g: Graph, sources: np.ndarray, sink: TextIO) -> None:
    """Debug TSV dump: "source<TAB>node<TAB>distance" for reachable nodes."""
    for s in np.asarray(sources).ravel():
        dist = bfs(g, int(s))
        for v in np.flatnonzero(dist != UNREACHABLE):
            sink.write(f"{g.labels[int(s)]}\t{g.labels[int(v)]}\t{int(dist[v])}\n")
