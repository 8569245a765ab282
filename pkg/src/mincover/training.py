"""Full-batch gradient-descent training for the three objectives, plus
standard/robust accuracy evaluation.

Objectives: standard (mean loss), adversarial (worst-case loss at eps; the
closed form for binary linear models, PGD inner maximization otherwise) and
generalized adversarial (weighted coreset loss at eps + eta). Training is
deterministic given the seed.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, log_softmax

from .attacks import AttackConfig, attack_config, dual_weight_norm, pgd_attack, worst_case_margins
from .covering import CoverSolution
from .dataset import LabeledDataset, NormSpec, L2
from .errors import DataError, DivergenceError
from .models import LinearModel, MLPModel, batch_loss, signed_labels
from .rng import SplitMix64

OBJECTIVES = ("standard", "adversarial", "generalized_adversarial")


@dataclass
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 200
    seed: int = 0
    objective: str = "standard"
    attack: AttackConfig | None = None
    total_count_n: int | None = None  # the |T| normalizer for the generalized loss

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise DataError("learning_rate must be positive")
        if self.epochs < 1:
            raise DataError("epochs must be >= 1")
        if self.objective not in OBJECTIVES:
            raise DataError(f"unknown objective {self.objective!r}")
        if self.objective != "standard" and self.attack is None:
            raise DataError(f"objective {self.objective!r} needs an AttackConfig")


@dataclass
class TrainResult:
    model: object
    curve: list = field(default_factory=list)  # objective value per epoch

    @property
    def final_loss(self) -> float:
        return self.curve[-1]


def _dual_norm_subgrad(w: np.ndarray, norm: NormSpec) -> np.ndarray:
    """Subgradient of ||w||_q at w, with q dual to the perturbation norm."""
    q = norm.dual
    if q == 1.0:
        return np.sign(w)
    if q == 2.0:
        size = np.linalg.norm(w)
        return w / size if size > 0 else np.zeros_like(w)
    g = np.zeros_like(w)
    i = int(np.argmax(np.abs(w)))  # ties break at the lowest index
    g[i] = np.sign(w[i])
    return g


def binary_linear_objective(
    w: np.ndarray,
    b: float,
    X: np.ndarray,
    y: np.ndarray,
    radius: float = 0.0,
    norm: NormSpec = L2,
    weights: np.ndarray | None = None,
    total_n: int | None = None,
):
    """Value and (grad_w, grad_b) of the weighted worst-case logistic objective.

    radius=0 with unit weights is the standard loss; radius=eps gives the
    adversarial loss (exact inner max); weights q with radius eps+eta give the
    generalized loss scaled by 1/total_n.
    """
    q = np.ones(len(X)) if weights is None else np.asarray(weights, dtype=np.float64)
    scale = float(len(X) if total_n is None else total_n)
    s = signed_labels(y)
    margins = s * (X @ w + b)
    dual = dual_weight_norm(w, norm) if radius > 0 else 0.0
    shifted = margins - radius * dual
    value = float((q * np.logaddexp(0.0, -shifted)).sum() / scale)
    dldm = -expit(-shifted) * q / scale  # d loss / d shifted-margin, per point
    grad_w = X.T @ (dldm * s)
    if radius > 0:
        grad_w = grad_w - dldm.sum() * radius * _dual_norm_subgrad(w, norm)
    grad_b = float((dldm * s).sum())
    return value, grad_w, grad_b


def _multiclass_objective(W, b, X, y):
    """Cross-entropy value and gradients for a multiclass linear model."""
    scores = X @ W.T + b
    logp = log_softmax(scores, axis=1)
    idx = np.arange(len(y))
    value = float(-logp[idx, y].mean())
    p = np.exp(logp)
    p[idx, y] -= 1.0
    p /= len(y)
    return value, p.T @ X, p.sum(axis=0)


def _mlp_objective(model: MLPModel, X, y):
    """Logistic loss value and parameter gradients for the tanh MLP."""
    s = signed_labels(y)
    h = np.tanh(X @ model.w1.T + model.b1)
    margins = s * (h @ model.w2 + model.b2)
    value = float(np.logaddexp(0.0, -margins).mean())
    dscore = -expit(-margins) * s / len(y)
    g_w2 = h.T @ dscore
    g_b2 = float(dscore.sum())
    dh = dscore[:, None] * model.w2[None, :] * (1.0 - h * h)
    return value, dh.T @ X, dh.sum(axis=0), g_w2, g_b2


def _resolve_training_data(ds: LabeledDataset, cfg: TrainConfig, cover: CoverSolution | None):
    if cfg.objective != "generalized_adversarial":
        return ds.points, ds.labels, None, None, 0.0
    if cover is None or cover.weights is None:
        raise DataError("generalized objective needs a CoverSolution with weights")
    coreset = ds.subset(cover.selected)
    total_n = cfg.total_count_n if cfg.total_count_n is not None else len(ds)
    return (
        coreset.points,
        coreset.labels,
        np.asarray(cover.weights, dtype=np.float64),
        total_n,
        cover.eta,
    )


def train(
    ds: LabeledDataset,
    cfg: TrainConfig,
    model_init=None,
    cover: CoverSolution | None = None,
) -> TrainResult:
    """Minimize the configured objective with cfg.epochs full-batch GD steps.

    For the generalized objective, ds is the full dataset and cover selects
    the weighted coreset; the perturbation radius becomes eps + cover.eta.
    Raises DivergenceError naming the epoch if the loss leaves the reals.
    """
    X, y, weights, total_n, eta = _resolve_training_data(ds, cfg, cover)
    n_classes = max(ds.n_classes, int(ds.labels.max()) + 1)
    if cfg.objective == "standard":
        radius = 0.0
    else:
        radius = cfg.attack.eps + (eta if cfg.objective == "generalized_adversarial" else 0.0)
    norm = cfg.attack.norm if cfg.attack is not None else L2

    model = model_init if model_init is not None else _default_init(ds, n_classes, cfg.seed)
    if isinstance(model, LinearModel) and model.is_binary:
        if n_classes > 2:
            raise DataError("binary model on a dataset with more than two classes")
        w, b = model.weights.copy(), float(model.bias)
        curve = []
        for epoch in range(cfg.epochs):
            value, gw, gb = binary_linear_objective(
                w, b, X, y, radius=radius, norm=norm, weights=weights, total_n=total_n
            )
            if not np.isfinite(value):
                raise DivergenceError(epoch)
            curve.append(value)
            w = w - cfg.learning_rate * gw
            b = b - cfg.learning_rate * gb
        return TrainResult(model=LinearModel(w, b), curve=curve)

    if isinstance(model, LinearModel):
        if cfg.objective != "standard":
            raise DataError(
                "multiclass linear training supports the standard objective only; "
                "use a binary model or an MLP with PGD for adversarial objectives"
            )
        W, b = model.weights.copy(), np.asarray(model.bias, dtype=np.float64).copy()
        curve = []
        for epoch in range(cfg.epochs):
            value, gW, gb = _multiclass_objective(W, b, X, y)
            if not np.isfinite(value):
                raise DivergenceError(epoch)
            curve.append(value)
            W = W - cfg.learning_rate * gW
            b = b - cfg.learning_rate * gb
        return TrainResult(model=LinearModel(W, b), curve=curve)

    if isinstance(model, MLPModel):
        cur = MLPModel(model.w1.copy(), model.b1.copy(), model.w2.copy(), model.b2)
        curve = []
        q = np.ones(len(X)) if weights is None else weights
        scale = float(len(X) if total_n is None else total_n)
        for epoch in range(cfg.epochs):
            if radius > 0:
                pts = pgd_attack(cur, X, y, attack_config(radius, norm, steps=cfg.attack.steps))
            else:
                pts = X
            value, g_w1, g_b1, g_w2, g_b2 = _mlp_objective(cur, pts, y)
            if weights is not None:
                # weighted objective: recompute with per-point weights folded in
                value = float((q * batch_loss(cur, pts, y)).sum() / scale)
            if not np.isfinite(value):
                raise DivergenceError(epoch)
            curve.append(value)
            cur = MLPModel(
                cur.w1 - cfg.learning_rate * g_w1,
                cur.b1 - cfg.learning_rate * g_b1,
                cur.w2 - cfg.learning_rate * g_w2,
                cur.b2 - cfg.learning_rate * g_b2,
            )
        return TrainResult(model=cur, curve=curve)

    raise DataError(f"cannot train model type {type(model).__name__}")


def _default_init(ds: LabeledDataset, n_classes: int, seed: int):
    g = SplitMix64(seed)
    if n_classes <= 2:
        return LinearModel(0.01 * g.normals(ds.dim), 0.0)
    W = 0.01 * g.normals(n_classes * ds.dim).reshape(n_classes, ds.dim)
    return LinearModel(W, np.zeros(n_classes))


def accuracy(
    model,
    ds: LabeledDataset,
    eps: float = 0.0,
    norm: NormSpec = L2,
    attack: AttackConfig | None = None,
) -> float:
    """Fraction classified correctly; with eps > 0, under worst-case perturbation.

    Robust accuracy is exact for linear models (binary: worst-case margin stays
    positive; multiclass: every pairwise worst-case margin stays positive). For
    other models PGD is used, which can only overestimate robust accuracy.
    A zero margin counts as misclassified.
    """
    if eps < 0:
        raise DataError("eps must be non-negative")
    if eps == 0 and attack is None:
        if model.is_binary:
            margins = signed_labels(ds.labels) * model.scores(ds.points)
            return float((margins > 0).mean())
        return float((model.predict(ds.points) == ds.labels).mean())
    if isinstance(model, LinearModel) and model.is_binary:
        worst = worst_case_margins(model, ds.points, ds.labels, eps, norm)
        return float((worst > 0).mean())
    if isinstance(model, LinearModel):
        W, b = model.weights, model.bias
        scores = model.scores(ds.points)
        ok = np.ones(len(ds), dtype=bool)
        for j in range(W.shape[0]):
            diff_w = W[ds.labels] - W[j]
            margin = scores[np.arange(len(ds)), ds.labels] - scores[:, j]
            dual = np.linalg.norm(diff_w, ord=norm.dual, axis=1)
            ok &= (ds.labels == j) | (margin - eps * dual > 0)
        return float(ok.mean())
    cfg = attack or attack_config(eps, norm)
    adv = pgd_attack(model, ds.points, ds.labels, cfg)
    clean_ok = model.predict(ds.points) == ds.labels
    return float((clean_ok & (model.predict(adv) == ds.labels)).mean())
