"""Shared fixtures: small fixture graphs, random graph generators, and an
independent Floyd-Warshall oracle used to audit BFS-derived distances."""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from hopdist.graph import Graph, build_graph


def gnp_graph(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p) built directly from the upper triangle."""
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, 1)
    mask = rng.random(len(iu)) < p
    return build_graph(n, zip(iu[mask].tolist(), iv[mask].tolist()))


def ba_graph(n: int, m: int, seed: int) -> Graph:
    """Barabasi-Albert preferential attachment; connected and scale-free,
    a reasonable stand-in for a social network."""
    rng = np.random.default_rng(seed)
    edges: list[tuple[int, int]] = []
    repeated: list[int] = []
    targets = list(range(m))
    for v in range(m, n):
        for t in targets:
            edges.append((v, t))
            repeated.append(v)
            repeated.append(t)
        targets = []
        seen: set[int] = set()
        while len(targets) < m:
            x = repeated[int(rng.integers(len(repeated)))]
            if x not in seen:
                seen.add(x)
                targets.append(x)
    return build_graph(n, edges)


def ring_graph(n: int, extra_chords: int = 0, seed: int = 0) -> Graph:
    edges = [(i, (i + 1) % n) for i in range(n)]
    if extra_chords:
        rng = np.random.default_rng(seed)
        for _ in range(extra_chords):
            a, b = rng.integers(0, n, size=2)
            if a != b:
                edges.append((int(a), int(b)))
    return build_graph(n, edges)


def ws_graph(n: int, k: int, p: float, seed: int) -> Graph:
    """Watts-Strogatz small world: ring lattice with rewired chords. Long
    diameter plus local structure makes hop distances learnable, a good
    desk-scale stand-in for large social graphs."""
    rng = np.random.default_rng(seed)
    edges: set[tuple[int, int]] = set()
    half = k // 2
    for i in range(n):
        for j in range(1, half + 1):
            a, b = i, (i + j) % n
            if rng.random() < p:
                while True:
                    b = int(rng.integers(n))
                    if b != a and (min(a, b), max(a, b)) not in edges:
                        break
            edges.add((min(a, b), max(a, b)))
    return build_graph(n, edges)


def two_cliques_graph(k: int) -> Graph:
    """Two k-cliques joined by a single bridge edge (0 .. k-1 | k .. 2k-1)."""
    edges = []
    for a in range(k):
        for b in range(a + 1, k):
            edges.append((a, b))
            edges.append((k + a, k + b))
    edges.append((k - 1, k))
    return build_graph(2 * k, edges)


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def floyd_warshall(g: Graph) -> np.ndarray:
    """Independent all-pairs oracle: O(n^3) min-plus relaxation."""
    n = g.node_count
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for u in range(n):
        d[u, g.neighbors(u)] = 1.0
    for k in range(n):
        np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :], out=d)
    return d


def facebook_path() -> Path | None:
    """SNAP ego-Facebook combined edge list, if provided by the environment."""
    env = os.environ.get("HOPDIST_FACEBOOK")
    candidates = [Path(env)] if env else []
    candidates.append(Path(__file__).resolve().parent.parent / "data" / "facebook_combined.txt")
    for c in candidates:
        if c.is_file():
            return c
    return None


needs_facebook = pytest.mark.skipif(
    facebook_path() is None,
    reason="SNAP facebook_combined.txt not present (no network in this build "
    "environment); set HOPDIST_FACEBOOK or place it at data/facebook_combined.txt",
)
