"""Poincare-ball node embeddings trained with Riemannian SGD.

Every node vector lives strictly inside the open unit ball. For each edge
(u, v) and sampled negatives v', training minimizes

    -log( exp(-dist(u, v)) / sum over v' in {v} + negatives of exp(-dist(u, v')) )

with negatives drawn proportional to degree^(3/4), skipping u and its
neighbors. The Euclidean gradient is rescaled by (1 - |theta|^2)^2 / 4 and
each updated row is projected back to norm <= 1 - margin.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numba
from numba import njit, prange

from ._rng import next_below, next_unit, stream_state
from .errors import ConfigError, NumericalError
from .graph import Graph
from .node2vec import _contains


@dataclass
class PoincareConfig:
    dim: int
    epochs: int = 50
    lr: float = 0.01
    negatives: int = 10
    burn_in_epochs: int = 10  # first epochs run at lr/10
    ball_margin: float = 1e-5
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.dim < 1 or self.epochs < 1 or self.negatives < 1:
            raise ConfigError("dim, epochs and negatives must all be >= 1")
        if self.lr <= 0:
            raise ConfigError("lr must be > 0")
        if not 0 < self.ball_margin < 1:
            raise ConfigError("ball_margin must lie in (0, 1)")
        if self.burn_in_epochs < 0:
            raise ConfigError("burn_in_epochs must be >= 0")


@dataclass
class PoincareEmbedding:
    vectors: np.ndarray  # (n, d), every row with norm <= 1 - ball_margin
    ball_margin: float
    epoch_loss: np.ndarray | None = None  # mean training loss per epoch
    epoch_max_norm: np.ndarray | None = None  # max row norm seen after any step

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def lookup(self, v: int) -> np.ndarray:
        if not 0 <= v < self.vectors.shape[0]:
            raise IndexError(f"node index {v} out of range [0, {self.vectors.shape[0]})")
        return self.vectors[v]


def poincare_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Hyperbolic distance arcosh(1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2)))."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    nx2 = float(x @ x)
    ny2 = float(y @ y)
    if nx2 >= 1.0 or ny2 >= 1.0:
        raise ValueError("poincare_distance arguments must lie strictly inside the unit ball")
    diff = x - y
    gamma = 1.0 + 2.0 * float(diff @ diff) / ((1.0 - nx2) * (1.0 - ny2))
    return float(np.arccosh(gamma))


def poincare_distances(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Row-wise batch of poincare_distance."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    nx2 = np.sum(xs * xs, axis=1)
    ny2 = np.sum(ys * ys, axis=1)
    if (nx2 >= 1.0).any() or (ny2 >= 1.0).any():
        raise ValueError("poincare_distances arguments must lie strictly inside the unit ball")
    diff2 = np.sum((xs - ys) ** 2, axis=1)
    gamma = 1.0 + 2.0 * diff2 / ((1.0 - nx2) * (1.0 - ny2))
    return np.arccosh(gamma)


def poincare_pair_loss(u_vec: np.ndarray, cand_vecs: np.ndarray) -> float:
    """Softmax loss of one training sample; cand_vecs[0] is the positive.

    Reference implementation for the gradient tests; the training kernel
    applies the matching analytic gradients.
    """
    d = np.array([poincare_distance(u_vec, c) for c in cand_vecs])
    m = d.min()
    return float(d[0] - m + np.log(np.sum(np.exp(-(d - m)))))


def _dist_grad(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Euclidean gradient of poincare_distance(x, y) with respect to x."""
    nx2 = float(x @ x)
    ny2 = float(y @ y)
    alpha = 1.0 - nx2
    beta = 1.0 - ny2
    diff = x - y
    gamma = 1.0 + 2.0 * float(diff @ diff) / (alpha * beta)
    g2 = max(gamma * gamma - 1.0, 1e-30)
    coef = 4.0 / (beta * np.sqrt(g2))
    a = (ny2 - 2.0 * float(x @ y) + 1.0) / (alpha * alpha)
    return coef * (a * x - y / alpha)


def poincare_pair_grads(
    u_vec: np.ndarray, cand_vecs: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic Euclidean gradients of poincare_pair_loss wrt u and candidates."""
    u_vec = np.asarray(u_vec, dtype=np.float64)
    cand_vecs = np.asarray(cand_vecs, dtype=np.float64)
    d = np.array([poincare_distance(u_vec, c) for c in cand_vecs])
    w = np.exp(-(d - d.min()))
    s = w / w.sum()
    coef = -s
    coef[0] += 1.0
    grad_u = np.zeros_like(u_vec)
    grad_c = np.zeros_like(cand_vecs)
    for k, c in enumerate(cand_vecs):
        grad_u += coef[k] * _dist_grad(u_vec, c)
        grad_c[k] = coef[k] * _dist_grad(c, u_vec)
    return grad_u, grad_c


@njit(cache=True)
def _project_row(theta, r, limit):
    n2 = 0.0
    for t in range(theta.shape[1]):
        n2 += theta[r, t] * theta[r, t]
    norm = np.sqrt(n2)
    if norm >= limit:
        scale = limit / norm
        for t in range(theta.shape[1]):
            theta[r, t] *= scale
        return limit
    return norm


@njit(cache=True)
def _poincare_apply(theta, u, cands, count, lr, eps, dists, coefs, nc2s, gu_all, gc_all):
    """One Riemannian SGD step for (u, candidates); returns (loss, max_norm).

    All gradients are evaluated on the pre-step matrix, then applied row by
    row with each row's own metric scaling (1 - |row|^2)^2 / 4 followed by
    projection back into the ball. Matches poincare_pair_grads.
    """
    d = theta.shape[1]
    nu2 = 0.0
    for t in range(d):
        nu2 += theta[u, t] * theta[u, t]
    alpha = 1.0 - nu2
    for k in range(count):
        c = cands[k]
        nc2 = 0.0
        dot = 0.0
        diff2 = 0.0
        for t in range(d):
            vu = theta[u, t]
            vc = theta[c, t]
            nc2 += vc * vc
            dot += vu * vc
            dd = vu - vc
            diff2 += dd * dd
        beta = 1.0 - nc2
        gamma = 1.0 + 2.0 * diff2 / (alpha * beta)
        dists[k] = np.arccosh(gamma)
        nc2s[k] = nc2
        g2 = gamma * gamma - 1.0
        if g2 < 1e-30:
            g2 = 1e-30
        root = np.sqrt(g2)
        cu = 4.0 / (beta * root)
        cc = 4.0 / (alpha * root)
        au = (nc2 - 2.0 * dot + 1.0) / (alpha * alpha)
        ac = (nu2 - 2.0 * dot + 1.0) / (beta * beta)
        for t in range(d):
            gu_all[k, t] = cu * (au * theta[u, t] - theta[c, t] / alpha)
            gc_all[k, t] = cc * (ac * theta[c, t] - theta[u, t] / beta)
    # softmax over -distances, shifted by the minimum for stability
    m = dists[0]
    for k in range(1, count):
        if dists[k] < m:
            m = dists[k]
    ssum = 0.0
    for k in range(count):
        coefs[k] = np.exp(-(dists[k] - m))
        ssum += coefs[k]
    loss = dists[0] - m + np.log(ssum)
    for k in range(count):
        coefs[k] = -coefs[k] / ssum
    coefs[0] += 1.0  # coef_k = dLoss/ddist_k = delta_k0 - softmax_k
    limit = 1.0 - eps
    max_norm = 0.0
    for k in range(count):
        c = cands[k]
        beta = 1.0 - nc2s[k]
        scale = lr * coefs[k] * (beta * beta) / 4.0
        for t in range(d):
            theta[c, t] -= scale * gc_all[k, t]
        norm = _project_row(theta, c, limit)
        if norm > max_norm:
            max_norm = norm
    rscale = lr * (alpha * alpha) / 4.0
    for t in range(d):
        acc = 0.0
        for k in range(count):
            acc += coefs[k] * gu_all[k, t]
        theta[u, t] -= rscale * acc
    norm = _project_row(theta, u, limit)
    if norm > max_norm:
        max_norm = norm
    return loss, max_norm


@njit(cache=True)
def _draw_poincare_negative(indptr, indices, noise_cdf, u, v, state):
    """One negative: degree^(3/4) draw rejecting u, v and neighbors of u."""
    n = indptr.shape[0] - 1
    total = noise_cdf[n - 1]
    cand = -1
    for _ in range(16):
        x, state = next_unit(state)
        cand = np.searchsorted(noise_cdf, x * total, side="right")
        if cand >= n:  # x*total can round up to total itself
            cand = n - 1
        if cand == u or cand == v:
            cand = -1
            continue
        if _contains(indices, indptr[u], indptr[u + 1], cand):
            cand = -1
            continue
        break
    if cand < 0:
        # dense neighborhoods: accept anything that is not u itself
        x, state = next_unit(state)
        cand = np.searchsorted(noise_cdf, x * total, side="right")
        if cand >= n:
            cand = n - 1
        if cand == u:
            cand = (u + 1) % n
    return cand, state


@njit(cache=True)
def _poincare_train(
    indptr,
    indices,
    theta,
    src,
    dst,
    noise_cdf,
    negatives,
    epochs,
    lr,
    burn_in,
    eps,
    seed,
    epoch_loss,
    epoch_max_norm,
):
    n_pairs = src.shape[0]
    d = theta.shape[1]
    maxc = 1 + negatives
    cands = np.empty(maxc, dtype=np.int64)
    dists = np.empty(maxc, dtype=np.float64)
    coefs = np.empty(maxc, dtype=np.float64)
    nc2s = np.empty(maxc, dtype=np.float64)
    gu_all = np.empty((maxc, d), dtype=np.float64)
    gc_all = np.empty((maxc, d), dtype=np.float64)
    order = np.arange(n_pairs)
    state = stream_state(seed, 0xBA11)
    for ep in range(epochs):
        alpha = lr / 10.0 if ep < burn_in else lr
        for i in range(n_pairs - 1, 0, -1):
            j, state = next_below(state, i + 1)
            tmp = order[i]
            order[i] = order[j]
            order[j] = tmp
        loss_sum = 0.0
        max_norm = 0.0
        for t in range(n_pairs):
            e = order[t]
            u = src[e]
            v = dst[e]
            cands[0] = v
            count = 1
            for _ in range(negatives):
                nj, state = _draw_poincare_negative(indptr, indices, noise_cdf, u, v, state)
                cands[count] = nj
                count += 1
            loss, mn = _poincare_apply(
                theta, u, cands, count, alpha, eps, dists, coefs, nc2s, gu_all, gc_all
            )
            loss_sum += loss
            if mn > max_norm:
                max_norm = mn
        epoch_loss[ep] = loss_sum / n_pairs if n_pairs > 0 else 0.0
        epoch_max_norm[ep] = max_norm


@njit(cache=True, parallel=True)
def _poincare_train_hogwild(
    indptr,
    indices,
    theta,
    src,
    dst,
    noise_cdf,
    negatives,
    epochs,
    lr,
    burn_in,
    eps,
    seed,
    n_chunks,
    epoch_loss,
):
    # Asynchronous shared-update mode: races on theta are tolerated and the
    # result is nondeterministic by design.
    n_pairs = src.shape[0]
    d = theta.shape[1]
    maxc = 1 + negatives
    chunk = (n_pairs + n_chunks - 1) // n_chunks
    for ep in range(epochs):
        alpha = lr / 10.0 if ep < burn_in else lr
        loss_sum = 0.0
        for ci in prange(n_chunks):
            cands = np.empty(maxc, dtype=np.int64)
            dists = np.empty(maxc, dtype=np.float64)
            coefs = np.empty(maxc, dtype=np.float64)
            nc2s = np.empty(maxc, dtype=np.float64)
            gu_all = np.empty((maxc, d), dtype=np.float64)
            gc_all = np.empty((maxc, d), dtype=np.float64)
            state = stream_state(seed, ep * n_chunks + ci)
            lo = ci * chunk
            hi = min(lo + chunk, n_pairs)
            local = 0.0
            for e in range(lo, hi):
                u = src[e]
                v = dst[e]
                cands[0] = v
                count = 1
                for _ in range(negatives):
                    nj, state = _draw_poincare_negative(
                        indptr, indices, noise_cdf, u, v, state
                    )
                    cands[count] = nj
                    count += 1
                loss, _ = _poincare_apply(
                    theta, u, cands, count, alpha, eps, dists, coefs, nc2s, gu_all, gc_all
                )
                local += loss
            loss_sum += local
        epoch_loss[ep] = loss_sum / n_pairs if n_pairs > 0 else 0.0


def train_poincare(g: Graph, cfg: PoincareConfig) -> PoincareEmbedding:
    """Fit ball embeddings on the undirected edge set of g.

    Each edge is used in both orientations per epoch, in a seeded per-epoch
    shuffle; the first burn_in_epochs run at lr/10.
    """
    n = g.node_count
    if n == 0:
        raise ConfigError("cannot embed an empty graph")
    rng = np.random.default_rng(cfg.seed)
    theta = rng.uniform(-0.001, 0.001, size=(n, cfg.dim))
    degrees = g.degrees().astype(np.float64)
    epoch_loss = np.zeros(cfg.epochs, dtype=np.float64)
    epoch_max_norm = np.zeros(cfg.epochs, dtype=np.float64)
    if g.edge_count > 0:
        noise_cdf = np.cumsum(degrees**0.75)
        src = np.repeat(np.arange(n, dtype=np.int64), g.degrees())
        dst = g.indices.astype(np.int64)
        if cfg.workers > 1:
            numba.set_num_threads(min(cfg.workers, numba.config.NUMBA_NUM_THREADS))
            _poincare_train_hogwild(
                g.indptr,
                g.indices,
                theta,
                src,
                dst,
                noise_cdf,
                cfg.negatives,
                cfg.epochs,
                cfg.lr,
                cfg.burn_in_epochs,
                cfg.ball_margin,
                cfg.seed,
                numba.get_num_threads(),
                epoch_loss,
            )
            epoch_max_norm[:] = np.sqrt(np.max(np.sum(theta * theta, axis=1)))
        else:
            _poincare_train(
                g.indptr,
                g.indices,
                theta,
                src,
                dst,
                noise_cdf,
                cfg.negatives,
                cfg.epochs,
                cfg.lr,
                cfg.burn_in_epochs,
                cfg.ball_margin,
                cfg.seed,
                epoch_loss,
                epoch_max_norm,
            )
    if not np.isfinite(theta).all():
        raise NumericalError("poincare training produced non-finite embeddings")
    return PoincareEmbedding(
        vectors=theta,
        ball_margin=cfg.ball_margin,
        epoch_loss=epoch_loss,
        epoch_max_norm=epoch_max_norm,
    )
