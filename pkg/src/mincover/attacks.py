"""Input-space perturbations: exact worst case for linear models, PGD for
anything differentiable, dense grid search as a low-dimensional oracle."""

from dataclasses import dataclass

import numpy as np

from .dataset import NormSpec, LINF, L2
from .errors import DataError
from .models import LinearModel, batch_loss, batch_loss_grad_x, logistic, signed_labels


def eps2_from_epsinf(eps_inf: float, n: int) -> float:
    """l2 radius whose ball volume matches the linf ball of radius eps_inf
    in n dimensions: sqrt(2n / (pi e)) * eps_inf."""
    if eps_inf <= 0:
        raise DataError("eps_inf must be positive")
    if n < 1:
        raise DataError("n must be a positive integer")
    return float(np.sqrt(2.0 * n / (np.pi * np.e)) * eps_inf)


@dataclass
class AttackConfig:
    """Perturbation budget and inner-maximization strategy."""

    eps: float
    alpha: float
    steps: int = 10
    norm: NormSpec = LINF
    mode: str = "pgd"

    def __post_init__(self):
        if self.eps < 0:
            raise DataError("eps must be non-negative")
        if self.alpha <= 0:
            raise DataError("alpha must be positive")
        if self.steps < 1:
            raise DataError("steps must be >= 1")
        if self.mode not in ("pgd", "exact_linear", "grid"):
            raise DataError(f"unknown attack mode {self.mode!r}")


def attack_config(
    eps: float, norm: NormSpec = LINF, alpha: float | None = None, steps: int = 10,
    mode: str = "pgd",
) -> AttackConfig:
    """AttackConfig with the default step size alpha = eps/4."""
    if alpha is None:
        alpha = eps / 4.0 if eps > 0 else 1.0
    return AttackConfig(eps=eps, alpha=alpha, steps=steps, norm=norm, mode=mode)


def dual_weight_norm(weights: np.ndarray, norm: NormSpec) -> float:
    """||w||_q with q dual to the perturbation norm p."""
    return float(np.linalg.norm(weights, ord=norm.dual))


def worst_case_margins(model: LinearModel, X, y, eps: float, norm: NormSpec) -> np.ndarray:
    """Smallest achievable signed margin under ||delta|| <= eps (binary linear)."""
    if not isinstance(model, LinearModel) or not model.is_binary:
        raise DataError("exact worst case requires a binary LinearModel")
    if eps < 0:
        raise DataError("eps must be non-negative")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    margins = signed_labels(y) * model.scores(X)
    return margins - eps * dual_weight_norm(model.weights, norm)


def linear_worst_case_loss(model: LinearModel, X, y, eps: float, norm: NormSpec = LINF) -> np.ndarray:
    """Exact max of the logistic loss over the eps-ball, per point.

    The loss is nonincreasing in the margin, so the maximum sits at the
    margin reduced by eps times the dual norm of the weights.
    """
    return logistic(worst_case_margins(model, X, y, eps, norm))


def pgd_attack(model, x, y, cfg: AttackConfig):
    """Projected gradient ascent on the loss inside the eps-ball around x.

    linf: signed-gradient steps of size alpha, then coordinate clamp;
    l2: gradient rescaled to length alpha, then ball projection. Tracks the
    best iterate including the start, so the result never does worse than x.
    Accepts one point (n,) or a batch (N, n); returns the same shape.
    """
    x_arr = np.asarray(x, dtype=np.float64)
    single = x_arr.ndim == 1
    x0 = np.atleast_2d(x_arr)
    y_arr = np.full(len(x0), y) if np.ndim(y) == 0 else np.asarray(y)
    if cfg.norm.p not in (2.0, float("inf")):
        raise DataError("pgd_attack supports the linf and l2 norms only")

    best = x0.copy()
    best_loss = batch_loss(model, x0, y_arr)
    adv = x0.copy()
    for _ in range(cfg.steps):
        grad = batch_loss_grad_x(model, adv, y_arr)
        if cfg.norm.p == float("inf"):
            adv = adv + cfg.alpha * np.sign(grad)
            adv = np.clip(adv, x0 - cfg.eps, x0 + cfg.eps)
        else:
            gnorm = np.linalg.norm(grad, axis=1, keepdims=True)
            step = np.where(gnorm > 0, cfg.alpha * grad / np.where(gnorm > 0, gnorm, 1.0), 0.0)
            delta = adv + step - x0
            dnorm = np.linalg.norm(delta, axis=1, keepdims=True)
            shrink = np.where(dnorm > cfg.eps, cfg.eps / np.where(dnorm > 0, dnorm, 1.0), 1.0)
            adv = x0 + delta * shrink
        loss = batch_loss(model, adv, y_arr)
        gain = loss > best_loss
        best[gain] = adv[gain]
        best_loss[gain] = loss[gain]
    return best[0] if single else best


def grid_worst_case_loss(
    model, x, y, eps: float, norm: NormSpec = LINF, points_per_axis: int = 201
) -> float:
    """Dense-mesh maximum of the loss over the eps-ball; oracle for dim <= 3.

    The mesh includes the ball boundary and delta = 0 (odd points_per_axis).
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    n = len(x)
    if n > 3:
        raise DataError("grid search is only tractable for dim <= 3")
    if points_per_axis % 2 == 0:
        raise DataError("points_per_axis must be odd so the mesh contains delta=0")
    if eps == 0:
        return float(batch_loss(model, x[None, :], [y])[0])
    axes = [np.linspace(-eps, eps, points_per_axis)] * n
    mesh = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    if norm.p != float("inf"):
        keep = np.linalg.norm(mesh, ord=norm.p, axis=1) <= eps
        mesh = mesh[keep]
    losses = batch_loss(model, x[None, :] + mesh, np.full(len(mesh), y))
    return float(losses.max())


def worst_case_loss(model, X, y, eps: float, norm: NormSpec, mode: str, cfg: AttackConfig | None = None) -> np.ndarray:
    """Per-point inner maximization dispatched by mode."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y).reshape(-1)
    if mode == "exact_linear":
        return linear_worst_case_loss(model, X, y, eps, norm)
    if mode == "pgd":
        cfg = cfg or attack_config(eps, norm)
        if cfg.eps != eps or cfg.norm != norm:
            cfg = AttackConfig(eps=eps, alpha=cfg.alpha, steps=cfg.steps, norm=norm, mode="pgd")
        adv = pgd_attack(model, X, y, cfg)
        return batch_loss(model, adv, y)
    if mode == "grid":
        return np.array(
            [grid_worst_case_loss(model, xi, yi, eps, norm) for xi, yi in zip(X, y)]
        )
    raise DataError(f"unknown inner maximization mode {mode!r}")
