"""Desk-scale classifiers: linear margin models and a small tanh MLP.

Binary models score with w.x + b and predict positive margin as class 1;
dataset labels {0, 1} map to signs {-1, +1}. Multiclass linear models hold
one weight row per class and are scored with cross-entropy. Losses are
logistic on the signed margin, so the worst case over a perturbation ball
has a closed form for linear models.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, log_softmax

from .errors import DataError
from .rng import SplitMix64


def signed_labels(y) -> np.ndarray:
    """Map {0,1} (or already-signed {-1,+1}) labels to {-1.0, +1.0}."""
    y = np.asarray(y)
    return np.where(y > 0, 1.0, -1.0)


def logistic(margins) -> np.ndarray:
    """log(1 + exp(-m)), stable for large |m|."""
    return np.logaddexp(0.0, -np.asarray(margins, dtype=np.float64))


@dataclass
class LinearModel:
    """Linear classifier; weights (n,) for binary tasks, (K, n) for multiclass."""

    weights: np.ndarray
    bias: np.ndarray | float = 0.0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim == 1:
            self.bias = float(self.bias)
            finite = np.isfinite(self.weights).all() and np.isfinite(self.bias)
        elif self.weights.ndim == 2:
            self.bias = np.broadcast_to(
                np.asarray(self.bias, dtype=np.float64), (self.weights.shape[0],)
            ).copy()
            finite = np.isfinite(self.weights).all() and np.isfinite(self.bias).all()
        else:
            raise DataError(f"weights must be (n,) or (K, n), got {self.weights.shape}")
        if not finite:
            raise DataError("model parameters must be finite")

    @property
    def is_binary(self) -> bool:
        return self.weights.ndim == 1

    @property
    def dim(self) -> int:
        return self.weights.shape[-1]

    def scores(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.dim:
            raise DataError(f"input dim {X.shape[1]} != model dim {self.dim}")
        if self.is_binary:
            return X @ self.weights + self.bias
        return X @ self.weights.T + self.bias

    def predict(self, X) -> np.ndarray:
        s = self.scores(X)
        if self.is_binary:
            return (s > 0).astype(np.int64)
        return s.argmax(axis=1)


@dataclass
class MLPModel:
    """One-hidden-layer tanh network with a single output logit (binary)."""

    w1: np.ndarray  # (hidden, n)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden,)
    b2: float

    def __post_init__(self):
        self.w1 = np.asarray(self.w1, dtype=np.float64)
        self.b1 = np.asarray(self.b1, dtype=np.float64)
        self.w2 = np.asarray(self.w2, dtype=np.float64)
        self.b2 = float(self.b2)

    @classmethod
    def init(cls, dim: int, hidden: int = 8, seed: int = 0, scale: float = 1.0) -> "MLPModel":
        g = SplitMix64(seed)
        w1 = g.normals(hidden * dim).reshape(hidden, dim) * (scale / np.sqrt(dim))
        b1 = g.normals(hidden) * 0.1
        w2 = g.normals(hidden) * (scale / np.sqrt(hidden))
        return cls(w1=w1, b1=b1, w2=w2, b2=0.0)

    @property
    def is_binary(self) -> bool:
        return True

    @property
    def dim(self) -> int:
        return self.w1.shape[1]

    def hidden(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return np.tanh(X @ self.w1.T + self.b1)

    def scores(self, X) -> np.ndarray:
        return self.hidden(X) @ self.w2 + self.b2

    def predict(self, X) -> np.ndarray:
        return (self.scores(X) > 0).astype(np.int64)


def batch_loss(model, X, y) -> np.ndarray:
    """Per-point loss: logistic margin loss for binary models, cross-entropy
    for multiclass linear models. Labels are dataset labels (0..K-1)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y).reshape(-1)
    if model.is_binary:
        return logistic(signed_labels(y) * model.scores(X))
    logp = log_softmax(model.scores(X), axis=1)
    return -logp[np.arange(len(y)), y.astype(np.int64)]


def batch_loss_grad_x(model, X, y) -> np.ndarray:
    """Gradient of the per-point loss w.r.t. each input point, shape (N, n)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y).reshape(-1)
    if isinstance(model, LinearModel):
        if model.is_binary:
            s = signed_labels(y)
            m = s * model.scores(X)
            # d logistic(m) / dm = -sigmoid(-m)
            return (-expit(-m) * s)[:, None] * model.weights[None, :]
        p = np.exp(log_softmax(model.scores(X), axis=1))
        p[np.arange(len(y)), y.astype(np.int64)] -= 1.0
        return p @ model.weights
    if isinstance(model, MLPModel):
        s = signed_labels(y)
        h = model.hidden(X)
        m = s * (h @ model.w2 + model.b2)
        dscore = -expit(-m) * s
        return (dscore[:, None] * ((1.0 - h * h) * model.w2[None, :])) @ model.w1
    raise DataError(f"no input gradient for model type {type(model).__name__}")


def margin_loss(model, x, y) -> float:
    """Loss of one point; binary y may be given as 0/1 or -1/+1."""
    if model.is_binary:
        label = 1 if np.asarray(y) > 0 else 0
    else:
        label = int(y)
    return float(batch_loss(model, np.atleast_2d(x), [label])[0])
