"""Feedforward regressor (ReLU hidden layer, softplus scalar output) with
mini-batch SGD on mean squared error, plus the linear-regression baseline.

Predictions are rounded half-up to an integer hop count, floored at zero.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

from .errors import ConfigError, DataError, NumericalError


@dataclass
class MlpConfig:
    input_dim: int
    hidden_dim: int = 100
    lr: float = 0.01
    epochs: int = 15
    batch_size: int = 64
    seed: int = 0

    def __post_init__(self) -> None:
        if min(self.input_dim, self.hidden_dim, self.epochs, self.batch_size) < 1:
            raise ConfigError("input_dim, hidden_dim, epochs and batch_size must be >= 1")
        if self.lr <= 0:
            raise ConfigError("lr must be > 0")


@dataclass
class MlpModel:
    w1: np.ndarray  # (hidden, input)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden,) single output unit
    b2: float

    @property
    def input_dim(self) -> int:
        return self.w1.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.w1.shape[0]


@dataclass
class LinRegModel:
    w: np.ndarray
    b: float

    @property
    def input_dim(self) -> int:
        return len(self.w)


@dataclass
class TrainReport:
    per_epoch_mse: np.ndarray
    wall_time: np.ndarray  # seconds per epoch


def init_mlp(cfg: MlpConfig) -> MlpModel:
    """Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases."""
    rng = np.random.default_rng(cfg.seed)
    lim1 = np.sqrt(6.0 / (cfg.input_dim + cfg.hidden_dim))
    lim2 = np.sqrt(6.0 / (cfg.hidden_dim + 1))
    return MlpModel(
        w1=rng.uniform(-lim1, lim1, size=(cfg.hidden_dim, cfg.input_dim)),
        b1=np.zeros(cfg.hidden_dim),
        w2=rng.uniform(-lim2, lim2, size=cfg.hidden_dim),
        b2=0.0,
    )


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


def softplus(z):
    return np.logaddexp(0.0, z)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def forward(m: MlpModel, x: np.ndarray) -> float:
    """softplus(w2 . relu(w1 x + b1) + b2) for a single feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (m.input_dim,):
        raise ValueError(f"expected input of shape ({m.input_dim},), got {x.shape}")
    h = relu(m.w1 @ x + m.b1)
    return float(softplus(m.w2 @ h + m.b2))


def forward_batch(m: MlpModel, X: np.ndarray) -> np.ndarray:
    if X.ndim != 2 or X.shape[1] != m.input_dim:
        raise ValueError(f"expected (batch, {m.input_dim}) features, got {X.shape}")
    H = relu(X @ m.w1.T + m.b1)
    return softplus(H @ m.w2 + m.b2)


def mlp_loss_and_grads(
    m: MlpModel, X: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray, float]:
    """Mean squared error over the batch and its gradients wrt all parameters.

    This is the exact computation the training loop applies; the gradient
    tests diff it against central finite differences.
    """
    z1 = X @ m.w1.T + m.b1
    h = np.maximum(z1, 0.0)
    z2 = h @ m.w2 + m.b2
    yhat = softplus(z2)
    r = yhat - y
    loss = float(np.mean(r * r))
    B = X.shape[0]
    dz2 = (2.0 / B) * r * _sigmoid(z2)
    gw2 = dz2 @ h
    gb2 = float(dz2.sum())
    dh = np.outer(dz2, m.w2)
    dz1 = dh * (z1 > 0)
    gw1 = dz1.T @ X
    gb1 = dz1.sum(axis=0)
    return loss, gw1, gb1, gw2, gb2


def train_mlp(m: MlpModel, X: np.ndarray, y: np.ndarray, cfg: MlpConfig) -> TrainReport:
    """Mini-batch SGD with a seeded per-epoch shuffle; raises NumericalError
    if the loss stops being finite."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(X) == 0:
        raise ValueError("empty training set")
    if X.ndim != 2 or X.shape[1] != m.input_dim:
        raise ValueError(f"expected (n, {m.input_dim}) features, got {X.shape}")
    if len(X) != len(y):
        raise ValueError("features and targets disagree in length")
    rng = np.random.default_rng(cfg.seed)
    n = len(X)
    per_epoch = np.empty(cfg.epochs)
    walltime = np.empty(cfg.epochs)
    for ep in range(cfg.epochs):
        t0 = time.perf_counter()
        perm = rng.permutation(n)
        sq_sum = 0.0
        for lo in range(0, n, cfg.batch_size):
            idx = perm[lo : lo + cfg.batch_size]
            loss, gw1, gb1, gw2, gb2 = mlp_loss_and_grads(m, X[idx], y[idx])
            sq_sum += loss * len(idx)
            m.w1 -= cfg.lr * gw1
            m.b1 -= cfg.lr * gb1
            m.w2 -= cfg.lr * gw2
            m.b2 -= cfg.lr * gb2
        mse = sq_sum / n
        if not np.isfinite(mse):
            raise NumericalError(
                f"training diverged at epoch {ep}: mse={mse!r}; lower the learning rate"
            )
        per_epoch[ep] = mse
        walltime[ep] = time.perf_counter() - t0
    return TrainReport(per_epoch_mse=per_epoch, wall_time=walltime)


def predict_distance(m: MlpModel, x: np.ndarray) -> int:
    """Round-half-up of the forward pass, floored at 0."""
    return max(0, int(np.floor(forward(m, x) + 0.5)))


def predict_distances(m: MlpModel, X: np.ndarray) -> np.ndarray:
    out = np.floor(forward_batch(m, X) + 0.5).astype(np.int64)
    return np.maximum(out, 0)


def fit_linreg(X: np.ndarray, y: np.ndarray, ridge: float = 1e-6) -> LinRegModel:
    """Least squares via normal equations with an optional ridge term on the
    weights (the intercept is never penalized)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(X) == 0:
        raise ValueError("empty training set")
    if ridge < 0:
        raise ValueError("ridge must be >= 0")
    n, d = X.shape
    Xa = np.hstack([X, np.ones((n, 1))])
    gram = Xa.T @ Xa
    gram[:d, :d] += ridge * np.eye(d)
    rhs = Xa.T @ y
    try:
        sol = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        raise NumericalError(
            "normal equations are singular; pass a nonzero ridge to regularize"
        ) from None
    if not np.isfinite(sol).all():
        raise NumericalError("linear regression produced non-finite coefficients")
    return LinRegModel(w=sol[:d], b=float(sol[d]))


def linreg_predict(m: LinRegModel, X: np.ndarray) -> np.ndarray:
    raw = np.asarray(X, dtype=np.float64) @ m.w + m.b
    out = np.floor(raw + 0.5).astype(np.int64)
    return np.maximum(out, 0)


def save_model(sink: TextIO, model: MlpModel | LinRegModel) -> None:
    """Plain-text model file; first line is "mlp <in> <hidden>" or "linreg <in>"."""

    def row(vals) -> str:
        return " ".join(repr(float(x)) for x in np.atleast_1d(vals))

    if isinstance(model, MlpModel):
        sink.write(f"mlp {model.input_dim} {model.hidden_dim}\n")
        for r in model.w1:
            sink.write(row(r) + "\n")
        sink.write(row(model.b1) + "\n")
        sink.write(row(model.w2) + "\n")
        sink.write(row(model.b2) + "\n")
    else:
        sink.write(f"linreg {model.input_dim}\n")
        sink.write(row(model.w) + "\n")
        sink.write(row(model.b) + "\n")


def load_model(stream: TextIO) -> MlpModel | LinRegModel:
    lines = [ln.rstrip("\n") for ln in stream if ln.strip()]
    if not lines:
        raise DataError("empty model file")
    head = lines[0].split()

    def floats(ln: str) -> np.ndarray:
        return np.array([float(t) for t in ln.split()], dtype=np.float64)

    try:
        if head[0] == "mlp":
            input_dim, hidden_dim = int(head[1]), int(head[2])
            need = hidden_dim + 3
            body = [floats(ln) for ln in lines[1 : 1 + need]]
            if len(body) != need:
                raise DataError("truncated mlp model file")
            w1 = np.vstack(body[:hidden_dim])
            if w1.shape != (hidden_dim, input_dim):
                raise DataError("mlp model file has inconsistent W1 shape")
            return MlpModel(w1=w1, b1=body[hidden_dim], w2=body[hidden_dim + 1],
                            b2=float(body[hidden_dim + 2][0]))
        if head[0] == "linreg":
            input_dim = int(head[1])
            w = floats(lines[1])
            if len(w) != input_dim:
                raise DataError("linreg model file has inconsistent weight length")
            return LinRegModel(w=w, b=float(lines[2]))
    except (IndexError, ValueError) as e:
        raise DataError(f"malformed model file: {e}") from None
    raise DataError(f"unknown model tag {head[0]!r}")


def load_model_path(path: str | Path) -> MlpModel | LinRegModel:
    with open(path, "r", encoding="utf-8") as f:
        return load_model(f)
