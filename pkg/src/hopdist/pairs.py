"""Node-pair / hop-distance datasets harvested from landmark BFS trees.

build_pairs emits (landmark, node, d) for reachable nodes with 2 <= d <= cap
and, optionally, every intermediate pair along one BFS-tree shortest path
per node (any subpath of a shortest path is itself shortest, so those d
values are exact too). Pairs are deduplicated on unordered (u, v) keys.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np
from numba import njit

from .errors import DataError
from .graph import Graph
from .sssp import LandmarkSet, UNREACHABLE, _bfs_parents_fill, select_landmarks

OPERATORS = ("sub", "concat", "avg", "hadamard")


@dataclass
class PairDataset:
    u: np.ndarray  # int64 node indices
    v: np.ndarray  # int64 node indices
    d: np.ndarray  # int64 exact hop counts, all in [2, length_cap]
    length_cap: int
    landmarks: LandmarkSet | None = None

    def __len__(self) -> int:
        return len(self.d)

    @property
    def histogram(self) -> dict[int, int]:
        counts = np.bincount(self.d, minlength=self.length_cap + 1)
        return {int(k): int(c) for k, c in enumerate(counts) if c > 0}

    def keys(self, n: int) -> np.ndarray:
        """Unordered-pair keys lo * n + hi; assumes u < v as stored."""
        return self.u * np.int64(n) + self.v


@njit(cache=True)
def _emit_from_landmark(dist, parent, landmark, cap, harvest, path, out_u, out_v, out_d):
    n = dist.shape[0]
    count = 0
    for v in range(n):
        dv = dist[v]
        if dv < np.uint32(2) or dv > np.uint32(cap):
            continue
        dvi = int(dv)
        if not harvest:
            out_u[count] = landmark
            out_v[count] = v
            out_d[count] = dvi
            count += 1
            continue
        node = v
        for k in range(dvi, -1, -1):
            path[k] = node
            node = parent[node]
        for i in range(dvi - 1):
            for j in range(i + 2, dvi + 1):
                out_u[count] = path[i]
                out_v[count] = path[j]
                out_d[count] = j - i
                count += 1
    return count


def build_pairs(
    g: Graph, landmarks: LandmarkSet, length_cap: int, harvest_subpaths: bool = True
) -> PairDataset:
    """BFS from each landmark and collect exact pairs with 2 <= d <= length_cap."""
    if len(landmarks) == 0:
        raise ValueError("empty landmark set")
    if length_cap < 2:
        raise ValueError("length_cap must be >= 2")
    n = g.node_count
    per_node = (length_cap * (length_cap - 1)) // 2 if harvest_subpaths else 1
    dist = np.empty(n, dtype=np.uint32)
    parent = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    path = np.empty(length_cap + 1, dtype=np.int64)
    out_u = np.empty(n * per_node, dtype=np.int64)
    out_v = np.empty_like(out_u)
    out_d = np.empty_like(out_u)
    chunks_u: list[np.ndarray] = []
    chunks_v: list[np.ndarray] = []
    chunks_d: list[np.ndarray] = []
    for lm in landmarks.nodes:
        dist.fill(UNREACHABLE)
        parent.fill(-1)
        _bfs_parents_fill(g.indptr, g.indices, int(lm), dist, parent, queue)
        cnt = _emit_from_landmark(
            dist, parent, int(lm), length_cap, harvest_subpaths, path, out_u, out_v, out_d
        )
        chunks_u.append(out_u[:cnt].copy())
        chunks_v.append(out_v[:cnt].copy())
        chunks_d.append(out_d[:cnt].copy())
    u = np.concatenate(chunks_u)
    v = np.concatenate(chunks_v)
    d = np.concatenate(chunks_d)
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    keys, first = np.unique(lo * np.int64(n) + hi, return_index=True)
    return PairDataset(
        u=keys // n, v=keys % n, d=d[first], length_cap=length_cap, landmarks=landmarks
    )


def balance(ds: PairDataset, per_class_target: int | None = None, seed: int = 0) -> PairDataset:
    """Downsample over-represented distance classes to per_class_target pairs.

    The default target is the size of the smallest class holding at least 1%
    of the dataset, which flattens the histogram without discarding rare
    long-distance classes.
    """
    if len(ds) == 0:
        raise ValueError("cannot balance an empty dataset")
    hist = ds.histogram
    if per_class_target is None:
        floor = 0.01 * len(ds)
        eligible = [c for c in hist.values() if c >= floor]
        per_class_target = min(eligible) if eligible else max(hist.values())
    if per_class_target < 1:
        raise ValueError("per_class_target must be >= 1")
    rng = np.random.default_rng(seed)
    keep: list[np.ndarray] = []
    for length in sorted(hist):
        idx = np.flatnonzero(ds.d == length)
        if len(idx) > per_class_target:
            idx = rng.choice(idx, size=per_class_target, replace=False)
        keep.append(idx)
    sel = np.sort(np.concatenate(keep))
    return PairDataset(
        u=ds.u[sel], v=ds.v[sel], d=ds.d[sel], length_cap=ds.length_cap, landmarks=ds.landmarks
    )


def split_disjoint(
    g: Graph,
    l_train: int,
    l_test: int,
    cap: int,
    seed: int = 0,
    strategy: str = "uniform",
    harvest_subpaths: bool = True,
) -> tuple[PairDataset, PairDataset]:
    """Draw l_train + l_test distinct landmarks, build train from the first
    l_train and test from the rest, then drop test pairs already in train."""
    lm = select_landmarks(g, l_train + l_test, strategy=strategy, seed=seed)
    train_lm = LandmarkSet(nodes=lm.nodes[:l_train], strategy=strategy, seed=seed)
    test_lm = LandmarkSet(nodes=lm.nodes[l_train:], strategy=strategy, seed=seed)
    train = build_pairs(g, train_lm, cap, harvest_subpaths)
    test = build_pairs(g, test_lm, cap, harvest_subpaths)
    n = g.node_count
    mask = ~np.isin(test.keys(n), train.keys(n))
    if not mask.any():
        raise DataError("test split is empty after removing pairs seen in training")
    test = PairDataset(
        u=test.u[mask], v=test.v[mask], d=test.d[mask], length_cap=cap, landmarks=test_lm
    )
    return train, test


def compose(u_vec: np.ndarray, v_vec: np.ndarray, op: str) -> np.ndarray:
    """Combine two node vectors into one feature vector.

    sub: u - v; concat: (u, v); avg: (u + v) / 2; hadamard: u * v.
    concat doubles the length, the rest preserve it.
    """
    u_vec = np.asarray(u_vec, dtype=np.float64)
    v_vec = np.asarray(v_vec, dtype=np.float64)
    if u_vec.shape != v_vec.shape:
        raise ValueError(f"vector shapes differ: {u_vec.shape} vs {v_vec.shape}")
    if op == "sub":
        return u_vec - v_vec
    if op == "concat":
        return np.concatenate([u_vec, v_vec])
    if op == "avg":
        return (u_vec + v_vec) / 2.0
    if op == "hadamard":
        return u_vec * v_vec
    raise ValueError(f"unknown operator {op!r}; expected one of {OPERATORS}")


def compose_batch(vectors: np.ndarray, u_idx: np.ndarray, v_idx: np.ndarray, op: str) -> np.ndarray:
    """Row-wise compose over an embedding matrix; returns (len(u_idx), d or 2d)."""
    uu = vectors[u_idx]
    vv = vectors[v_idx]
    if op == "sub":
        return uu - vv
    if op == "concat":
        return np.hstack([uu, vv])
    if op == "avg":
        return (uu + vv) / 2.0
    if op == "hadamard":
        return uu * vv
    raise ValueError(f"unknown operator {op!r}; expected one of {OPERATORS}")


def feature_matrix(
    ds: PairDataset, vectors: np.ndarray, op: str, augment_sub: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Features plus float targets for a dataset; optionally add the reversed
    orientation for the antisymmetric sub operator."""
    X = compose_batch(vectors, ds.u, ds.v, op)
    y = ds.d.astype(np.float64)
    if augment_sub and op == "sub":
        X = np.vstack([X, compose_batch(vectors, ds.v, ds.u, op)])
        y = np.concatenate([y, y])
    return X, y


def feature_dim(embedding_dim: int, op: str) -> int:
    if op not in OPERATORS:
        raise ValueError(f"unknown operator {op!r}; expected one of {OPERATORS}")
    return 2 * embedding_dim if op == "concat" else embedding_dim


def write_pairs(sink: TextIO, ds: PairDataset, labels: list[str]) -> None:
    """TSV rows "u<TAB>v<TAB>d" using external node labels."""
    for u, v, d in zip(ds.u, ds.v, ds.d):
        sink.write(f"{labels[int(u)]}\t{labels[int(v)]}\t{int(d)}\n")


def read_pairs(stream: Iterable[str]) -> list[tuple[str, str, int]]:
    triples = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise DataError(f"pair file line {lineno}: expected 'u<TAB>v<TAB>d', got {line!r}")
        try:
            d = int(parts[2])
        except ValueError:
            raise DataError(f"pair file line {lineno}: bad distance {parts[2]!r}") from None
        triples.append((parts[0], parts[1], d))
    return triples


def dataset_from_triples(
    triples: list[tuple[str, str, int]], label_index: dict[str, int]
) -> PairDataset:
    """Resolve external labels against an embedding/graph label index."""
    if not triples:
        raise DataError("pair file contains no pairs")
    u = np.empty(len(triples), dtype=np.int64)
    v = np.empty(len(triples), dtype=np.int64)
    d = np.empty(len(triples), dtype=np.int64)
    for i, (lu, lv, dd) in enumerate(triples):
        try:
            u[i] = label_index[lu]
            v[i] = label_index[lv]
        except KeyError as e:
            raise DataError(f"pair file references unknown node label {e.args[0]!r}") from None
        d[i] = dd
    return PairDataset(u=u, v=v, d=d, length_cap=int(d.max()))


def write_features_csv(sink: TextIO, X: np.ndarray, y: np.ndarray) -> None:
    """Debug dump: one row per pair, feature components then the target."""
    cols = [f"f{i}" for i in range(X.shape[1])]
    sink.write(",".join(cols + ["target"]) + "\n")
    for row, t in zip(X, y):
        sink.write(",".join(repr(float(x)) for x in row) + f",{repr(float(t))}\n")
