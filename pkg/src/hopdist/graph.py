"""Compact undirected graph parsed from edge-list text.

The adjacency is stored CSR-style: an offset array of length n+1 plus a
neighbor array of length 2m, with each node's neighbor slice sorted
ascending and duplicate-free. External node labels are arbitrary strings
mapped to dense indices in first-seen order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .errors import DataError, ParseError


@dataclass
class ParseReport:
    lines_read: int = 0
    edges_kept: int = 0
    self_loops_dropped: int = 0
    duplicates_dropped: int = 0


@dataclass
class Graph:
    indptr: np.ndarray  # int64, length n+1
    indices: np.ndarray  # int32, length 2m, sorted within each node slice
    labels: list[str]  # dense index -> external label
    _label_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}

    @property
    def node_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor indices of v (zero-copy view into the CSR array)."""
        self._check_node(v)
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        self._check_node(v)
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def index_of(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise DataError(f"unknown node label {label!r}") from None

    def has_label(self, label: str) -> bool:
        return label in self._label_index

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.node_count:
            raise IndexError(f"node index {v} out of range [0, {self.node_count})")


def parse_edge_list(stream: Iterable[str]) -> tuple[Graph, ParseReport]:
    """Parse edge-list lines into a Graph plus a ParseReport.

    One edge per line, two whitespace-separated labels; '#'-prefixed lines
    are comments and blank lines are ignored. Self-loops are dropped,
    parallel edges collapse to one, and every line is symmetrized.
    """
    labels: list[str] = []
    index: dict[str, int] = {}
    us: list[int] = []
    vs: list[int] = []
    seen: set[int] = set()
    rep = ParseReport()

    for lineno, raw in enumerate(stream, start=1):
        rep.lines_read += 1
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(
                f"line {lineno}: expected two node labels, got {len(parts)}: {line!r}"
            )
        ia = index.get(parts[0])
        if ia is None:
            ia = index[parts[0]] = len(labels)
            labels.append(parts[0])
        ib = index.get(parts[1])
        if ib is None:
            ib = index[parts[1]] = len(labels)
            labels.append(parts[1])
        if ia == ib:
            rep.self_loops_dropped += 1
            continue
        lo, hi = (ia, ib) if ia < ib else (ib, ia)
        key = (lo << 32) | hi
        if key in seen:
            rep.duplicates_dropped += 1
            continue
        seen.add(key)
        us.append(lo)
        vs.append(hi)
        rep.edges_kept += 1

    if not labels:
        raise ParseError("empty graph: no edges found in input")
    g = Graph(*_csr_arrays(len(labels), us, vs), labels=labels)
    return g, rep


def load_edge_list(path: str | Path) -> tuple[Graph, ParseReport]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_edge_list(f)


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a Graph directly from integer edge pairs; labels are str(index).

    Applies the same symmetrize/dedup/no-self-loop rules as the parser.
    Mostly useful for synthetic graphs in tests and benchmarks.
    """
    seen: set[int] = set()
    us: list[int] = []
    vs: list[int] = []
    for a, b in edges:
        if not (0 <= a < n and 0 <= b < n):
            raise DataError(f"edge ({a},{b}) out of bounds for n={n}")
        if a == b:
            continue
        lo, hi = (a, b) if a < b else (b, a)
        key = (lo << 32) | hi
        if key in seen:
            continue
        seen.add(key)
        us.append(lo)
        vs.append(hi)
    return Graph(*_csr_arrays(n, us, vs), labels=[str(i) for i in range(n)])


def _csr_arrays(n: int, us: list[int], vs: list[int]) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(us, dtype=np.int64)
    v = np.asarray(vs, dtype=np.int64)
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, dst.astype(np.int32)


def write_edge_list(g: Graph, sink: TextIO) -> int:
    """Write one line per undirected edge using external labels; returns m.

    Isolated nodes are emitted as self-loop lines so that re-parsing
    reproduces the full node set (the parser drops the loop but keeps the
    node), making write/parse a lossless round trip.
    """
    written = 0
    for u in range(g.node_count):
        row = g.neighbors(u)
        if len(row) == 0:
            sink.write(f"{g.labels[u]} {g.labels[u]}\n")
            continue
        for w in row[np.searchsorted(row, u + 1) :]:
            sink.write(f"{g.labels[u]} {g.labels[int(w)]}\n")
            written += 1
    return written
