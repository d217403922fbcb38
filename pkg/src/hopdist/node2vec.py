"""Biased second-order random walks and skip-gram negative-sampling training.

The walk corpus treats node sequences like sentences; training maximizes
    sum over (center c, context v in window) of
        log sigmoid(ctx[v] . vec[c]) + sum_j log sigmoid(-ctx[n_j] . vec[c])
with negatives n_j drawn from the corpus unigram distribution raised to 3/4.

Deterministic with workers=1 (the default). workers>1 switches to
asynchronous shared-memory updates (hogwild): unsynchronized concurrent
writes to the matrices are tolerated and results are NOT reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numba
from numba import njit, prange

from ._rng import next_below, next_unit, stream_state
from .errors import ConfigError, NumericalError
from .graph import Graph


@dataclass
class WalkConfig:
    walks_per_node: int = 10
    walk_length: int = 80
    return_param: float = 1.0  # p: weight 1/p for stepping back to the previous node
    inout_param: float = 1.0  # q: weight 1/q for stepping away from it
    seed: int = 0

    def __post_init__(self) -> None:
        if self.walks_per_node < 1:
            raise ConfigError("walks_per_node must be >= 1")
        if self.walk_length < 2:
            raise ConfigError("walk_length must be >= 2")
        if self.return_param <= 0 or self.inout_param <= 0:
            raise ConfigError("return_param and inout_param must be > 0")


@dataclass
class Corpus:
    walks: np.ndarray  # (walks_per_node * n, walk_length) int32, -1 padded
    lengths: np.ndarray  # int32 per-walk token count
    node_count: int

    def __len__(self) -> int:
        return self.walks.shape[0]

    def __iter__(self):
        for i in range(self.walks.shape[0]):
            yield self.walks[i, : self.lengths[i]]

    @property
    def token_count(self) -> int:
        return int(self.lengths.sum())


@dataclass
class SkipGramConfig:
    dim: int = 128
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    final_lr: float = 1e-4
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.dim < 1 or self.window < 1 or self.negatives < 1:
            raise ConfigError("dim, window and negatives must all be >= 1")
        if self.epochs < 1 or self.initial_lr <= 0:
            raise ConfigError("epochs must be >= 1 and initial_lr > 0")


@dataclass
class EmbeddingMatrix:
    vectors: np.ndarray  # (n, d) center vectors, the embedding proper
    context_vectors: np.ndarray  # (n, d) training-side output vectors

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def lookup(self, v: int) -> np.ndarray:
        if not 0 <= v < self.vectors.shape[0]:
            raise IndexError(f"node index {v} out of range [0, {self.vectors.shape[0]})")
        return self.vectors[v]


@njit(cache=True)
def _contains(arr, lo, hi, x):
    """Binary search for x in sorted arr[lo:hi]."""
    left, right = lo, hi
    while left < right:
        mid = (left + right) // 2
        if arr[mid] < x:
            left = mid + 1
        else:
            right = mid
    return left < hi and arr[left] == x


@njit(cache=True)
def _step_weight(indices, indptr, prev, x, p, q):
    if x == prev:
        return 1.0 / p
    if _contains(indices, indptr[prev], indptr[prev + 1], x):
        return 1.0
    return 1.0 / q


@njit(cache=True)
def _one_walk(indptr, indices, start, p, q, unbiased, walk_len, out_row, state):
    out_row[0] = start
    length = 1
    deg0 = indptr[start + 1] - indptr[start]
    if deg0 == 0:
        return length, state
    j, state = next_below(state, deg0)
    cur = int(indices[indptr[start] + j])
    out_row[1] = cur
    length = 2
    prev = start
    while length < walk_len:
        lo = indptr[cur]
        hi = indptr[cur + 1]
        deg = hi - lo
        # cur was reached over an edge, so deg >= 1 on an undirected graph
        if unbiased:
            j, state = next_below(state, deg)
            nxt = int(indices[lo + j])
        else:
            total = 0.0
            for k in range(lo, hi):
                total += _step_weight(indices, indptr, prev, int(indices[k]), p, q)
            u, state = next_unit(state)
            target = u * total
            acc = 0.0
            nxt = int(indices[hi - 1])
            for k in range(lo, hi):
                x = int(indices[k])
                acc += _step_weight(indices, indptr, prev, x, p, q)
                if target < acc:
                    nxt = x
                    break
        out_row[length] = nxt
        length += 1
        prev = cur
        cur = nxt
    return length, state


@njit(cache=True)
def _walks_kernel(indptr, indices, gamma, walk_len, p, q, seed, walks, lengths):
    n = indptr.shape[0] - 1
    unbiased = p == 1.0 and q == 1.0
    for v in range(n):
        # one RNG stream per start node: parallel-safe and order-independent
        state = stream_state(seed, v)
        for r in range(gamma):
            row = r * n + v
            length, state = _one_walk(
                indptr, indices, v, p, q, unbiased, walk_len, walks[row], state
            )
            lengths[row] = length


def generate_walks(g: Graph, cfg: WalkConfig) -> Corpus:
    """Sample walks_per_node truncated walks from every node.

    Transition out of (prev t, current v) weights neighbor x by 1/p if x = t,
    1 if x is adjacent to t, else 1/q; the first step is uniform. A start
    node without neighbors yields a single-token walk.
    """
    n = g.node_count
    if n == 0:
        raise ConfigError("cannot generate walks on an empty graph")
    rows = cfg.walks_per_node * n
    walks = np.full((rows, cfg.walk_length), -1, dtype=np.int32)
    lengths = np.zeros(rows, dtype=np.int32)
    _walks_kernel(
        g.indptr,
        g.indices,
        cfg.walks_per_node,
        cfg.walk_length,
        float(cfg.return_param),
        float(cfg.inout_param),
        cfg.seed,
        walks,
        lengths,
    )
    return Corpus(walks=walks, lengths=lengths, node_count=n)


def sgns_pair_loss(center_vec: np.ndarray, ctx_vecs: np.ndarray, labels: np.ndarray) -> float:
    """Loss of one (center, contexts) unit: -log sigmoid(+-ctx.center) summed.

    labels[i] is 1.0 for the positive context row, 0.0 for negatives.
    Reference implementation used by the gradient tests; the training kernel
    applies the matching analytic gradients.
    """
    f = ctx_vecs @ center_vec
    sign = 2.0 * labels - 1.0
    return float(np.sum(np.logaddexp(0.0, -sign * f)))


def sgns_pair_grads(
    center_vec: np.ndarray, ctx_vecs: np.ndarray, labels: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradients of sgns_pair_loss wrt the center and context rows."""
    f = ctx_vecs @ center_vec
    g = _sigmoid_np(f) - labels  # d loss / d f
    grad_center = g @ ctx_vecs
    grad_ctx = np.outer(g, center_vec)
    return grad_center, grad_ctx


def _sigmoid_np(z: np.ndarray) -> np.ndarray:
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


@njit(cache=True)
def _sigmoid(f):
    if f >= 0.0:
        return 1.0 / (1.0 + np.exp(-f))
    e = np.exp(f)
    return e / (1.0 + e)


@njit(cache=True)
def _sgns_apply(syn0, syn1, c, rows, labels, count, lr, work):
    """One SGD step for center c against context rows with 0/1 labels.

    Matches sgns_pair_grads: syn1 rows are updated with the pre-step center
    vector, and the accumulated center gradient uses pre-step syn1 rows.
    """
    d = syn0.shape[1]
    for t in range(d):
        work[t] = 0.0
    for i in range(count):
        r = rows[i]
        f = 0.0
        for t in range(d):
            f += syn1[r, t] * syn0[c, t]
        g = _sigmoid(f) - labels[i]
        step = lr * g
        for t in range(d):
            old = syn1[r, t]
            work[t] += g * old
            syn1[r, t] = old - step * syn0[c, t]
    for t in range(d):
        syn0[c, t] -= lr * work[t]


@njit(cache=True)
def _draw_negatives(noise_cdf, v, negatives, rows, labels, state):
    rows[0] = v
    labels[0] = 1.0
    count = 1
    n = noise_cdf.shape[0]
    total = noise_cdf[n - 1]
    for _ in range(negatives):
        u, state = next_unit(state)
        nj = np.searchsorted(noise_cdf, u * total, side="right")
        if nj >= n:  # u*total can round up to total itself
            nj = n - 1
        if nj == v:
            continue  # wasted draw, mirroring the usual word2vec behavior
        rows[count] = nj
        labels[count] = 0.0
        count += 1
    return count, state


@njit(cache=True)
def _sgns_train(
    walks, lengths, syn0, syn1, noise_cdf, window, negatives, epochs, lr0, lr_final, seed
):
    n_walks = walks.shape[0]
    d = syn0.shape[1]
    work = np.empty(d, dtype=np.float64)
    rows = np.empty(1 + negatives, dtype=np.int64)
    labels = np.empty(1 + negatives, dtype=np.float64)
    state = stream_state(seed, 0x5EED5)
    total_tokens = 0
    for w in range(n_walks):
        total_tokens += lengths[w]
    total = float(total_tokens * epochs)
    processed = 0
    for _ in range(epochs):
        for w in range(n_walks):
            length = lengths[w]
            for i in range(length):
                alpha = lr0 + (lr_final - lr0) * (processed / total)
                if alpha < lr_final:
                    alpha = lr_final
                processed += 1
                c = walks[w, i]
                jlo = i - window if i - window > 0 else 0
                jhi = i + window + 1 if i + window + 1 < length else length
                for j in range(jlo, jhi):
                    if j == i:
                        continue
                    v = walks[w, j]
                    count, state = _draw_negatives(
                        noise_cdf, v, negatives, rows, labels, state
                    )
                    _sgns_apply(syn0, syn1, c, rows, labels, count, alpha, work)
    return processed


@njit(cache=True, parallel=True)
def _sgns_train_hogwild(
    walks,
    lengths,
    syn0,
    syn1,
    noise_cdf,
    window,
    negatives,
    epochs,
    lr0,
    lr_final,
    seed,
    token_offset,
):
    # Asynchronous shared-update mode: concurrent unsynchronized writes to
    # syn0/syn1 are tolerated; output is nondeterministic by design.
    n_walks = walks.shape[0]
    d = syn0.shape[1]
    total = float(token_offset[n_walks] * epochs)
    for ep in range(epochs):
        base = ep * token_offset[n_walks]
        for w in prange(n_walks):
            work = np.empty(d, dtype=np.float64)
            rows = np.empty(1 + negatives, dtype=np.int64)
            labels = np.empty(1 + negatives, dtype=np.float64)
            state = stream_state(seed, ep * n_walks + w)
            length = lengths[w]
            for i in range(length):
                alpha = lr0 + (lr_final - lr0) * ((base + token_offset[w] + i) / total)
                if alpha < lr_final:
                    alpha = lr_final
                c = walks[w, i]
                jlo = i - window if i - window > 0 else 0
                jhi = i + window + 1 if i + window + 1 < length else length
                for j in range(jlo, jhi):
                    if j == i:
                        continue
                    v = walks[w, j]
                    count, state = _draw_negatives(
                        noise_cdf, v, negatives, rows, labels, state
                    )
                    _sgns_apply(syn0, syn1, c, rows, labels, count, alpha, work)


def unigram_noise_cdf(corpus: Corpus) -> np.ndarray:
    """Cumulative weights of the corpus unigram distribution raised to 3/4."""
    tokens = corpus.walks[corpus.walks >= 0]
    counts = np.bincount(tokens, minlength=corpus.node_count).astype(np.float64)
    return np.cumsum(counts**0.75)


def train_skipgram(corpus: Corpus, cfg: SkipGramConfig) -> EmbeddingMatrix:
    """SGD over all (center, context) pairs within the window, full window on
    both sides, negatives from unigram^(3/4); lr decays linearly per token."""
    if len(corpus) == 0 or corpus.token_count == 0:
        raise ConfigError("empty corpus")
    n = corpus.node_count
    rng = np.random.default_rng(cfg.seed)
    syn0 = (rng.random((n, cfg.dim)) - 0.5) / cfg.dim
    syn1 = np.zeros((n, cfg.dim), dtype=np.float64)
    noise_cdf = unigram_noise_cdf(corpus)
    if cfg.workers > 1:
        numba.set_num_threads(min(cfg.workers, numba.config.NUMBA_NUM_THREADS))
        token_offset = np.zeros(len(corpus) + 1, dtype=np.int64)
        np.cumsum(corpus.lengths, out=token_offset[1:])
        _sgns_train_hogwild(
            corpus.walks,
            corpus.lengths,
            syn0,
            syn1,
            noise_cdf,
            cfg.window,
            cfg.negatives,
            cfg.epochs,
            cfg.initial_lr,
            cfg.final_lr,
            cfg.seed,
            token_offset,
        )
    else:
        _sgns_train(
            corpus.walks,
            corpus.lengths,
            syn0,
            syn1,
            noise_cdf,
            cfg.window,
            cfg.negatives,
            cfg.epochs,
            cfg.initial_lr,
            cfg.final_lr,
            cfg.seed,
        )
    if not np.isfinite(syn0).all():
        raise NumericalError("skip-gram training produced non-finite embeddings")
    return EmbeddingMatrix(vectors=syn0, context_vectors=syn1)
