"""Empirical losses over datasets and the weighted coreset bound.

The weighted ("generalized") adversarial loss over a coreset at radius
eps + eta, with each selected point weighted by how many same-class points
its eta-ball holds, upper-bounds the classical adversarial loss at radius
eps over the full dataset. verify_bound certifies that inequality with the
exact linear inner maximization on both sides; PGD would under-approximate
the maxima and could certify falsely.
"""

from dataclasses import dataclass

import numpy as np

from .attacks import AttackConfig, worst_case_loss
from .covering import CoverSolution, verify_cover
from .dataset import LabeledDataset, NormSpec, L2
from .errors import CoverInvalidError, DataError
from .models import batch_loss


def empirical_standard_loss(model, ds: LabeledDataset) -> float:
    """Mean per-point loss over the dataset."""
    if len(ds) == 0:
        raise DataError("empty dataset")
    return float(batch_loss(model, ds.points, ds.labels).mean())


def empirical_adv_loss(
    model,
    ds: LabeledDataset,
    eps: float,
    norm: NormSpec = L2,
    inner: str = "exact_linear",
    attack: AttackConfig | None = None,
) -> float:
    """Mean worst-case loss over the dataset at radius eps.

    inner="exact_linear" is exact for binary linear models; "pgd" and "grid"
    are lower bounds of the true adversarial loss for other models.
    """
    if len(ds) == 0:
        raise DataError("empty dataset")
    if eps < 0:
        raise DataError("eps must be non-negative")
    losses = worst_case_loss(model, ds.points, ds.labels, eps, norm, inner, attack)
    return float(losses.mean())


def generalized_adv_loss(
    model,
    coreset: LabeledDataset,
    weights,
    radius: float,
    total_n: int,
    norm: NormSpec = L2,
    inner: str = "exact_linear",
    attack: AttackConfig | None = None,
) -> float:
    """Weighted adversarial loss over a coreset at the inflated radius.

    (1/total_n) * sum_j q_j * max_{||delta|| <= radius} loss(x_j + delta, y_j);
    with radius = eps and all q = 1 over the full dataset this is exactly the
    classical adversarial loss.
    """
    if weights is None:
        raise DataError("coreset weights are required for the generalized loss")
    q = np.asarray(weights, dtype=np.float64).reshape(-1)
    if len(q) != len(coreset):
        raise DataError(f"{len(q)} weights for {len(coreset)} coreset points")
    if radius < 0:
        raise DataError("radius must be non-negative")
    if total_n < len(coreset):
        raise DataError("total_n cannot be smaller than the coreset")
    losses = worst_case_loss(model, coreset.points, coreset.labels, radius, norm, inner, attack)
    return float((q * losses).sum() / total_n)


@dataclass
class BoundReport:
    """Outcome of one coreset-bound certification."""

    lhs: float  # adversarial loss over the full dataset at eps
    rhs: float  # weighted coreset loss at eps + eta
    holds: bool
    gap: float  # rhs - lhs


def verify_bound(
    model,
    ds: LabeledDataset,
    sol: CoverSolution,
    eps: float,
    norm: NormSpec = L2,
    eta: float | None = None,
    tol: float = 1e-9,
) -> BoundReport:
    """Certify lhs <= rhs for one model/dataset/cover triple.

    Both sides use the exact inner maximization (binary linear models). The
    cover must be valid at eta; the provided weights are used as-is, so a
    corrupted solution reports holds=False rather than erroring.
    """
    eta = sol.eta if eta is None else eta
    if eta < 0 or eps < 0:
        raise DataError("eps and eta must be non-negative")
    check = verify_cover(ds, CoverSolution(sol.selected, eta, sol.weights, sol.solver), norm)
    if not check.valid:
        raise CoverInvalidError(
            f"solution is not a valid cover at eta={eta}; violations at {check.violations[:5]}"
        )
    if sol.weights is None:
        raise DataError("cover solution has no weights")
    lhs = empirical_adv_loss(model, ds, eps, norm, inner="exact_linear")
    rhs = generalized_adv_loss(
        model,
        ds.subset(sol.selected),
        sol.weights,
        radius=eps + eta,
        total_n=len(ds),
        norm=norm,
        inner="exact_linear",
    )
    return BoundReport(lhs=lhs, rhs=rhs, holds=lhs <= rhs + tol, gap=rhs - lhs)
