"""Distance primitives: lp metrics, directed and Hausdorff distances, class separation."""

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import LabeledDataset, NormSpec, L2, as_points
from .errors import DataError

_CDIST_METRIC = {1.0: "cityblock", 2.0: "euclidean", float("inf"): "chebyshev"}


def lp_distance(x, y, norm: NormSpec = L2) -> float:
    """||x - y||_p for a single pair of points."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.shape != y.shape:
        raise DataError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return float(np.linalg.norm(x - y, ord=norm.p))


def pairwise_distances(X, Y, norm: NormSpec = L2) -> np.ndarray:
    """Full |X| x |Y| distance matrix."""
    X, Y = as_points(X), as_points(Y)
    if X.shape[1] != Y.shape[1]:
        raise DataError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    return cdist(X, Y, metric=_CDIST_METRIC[norm.p])


def _check_nonempty(X, Y):
    if len(X) == 0 or len(Y) == 0:
        raise DataError("directed/Hausdorff distance requires non-empty point sets")


def directed_distance(X, Y, norm: NormSpec = L2) -> float:
    """d(X -> Y): worst distance from a point of X to its nearest point of Y."""
    X, Y = as_points(X), as_points(Y)
    _check_nonempty(X, Y)
    return float(pairwise_distances(X, Y, norm).min(axis=1).max())


def hausdorff_distance(X, Y, norm: NormSpec = L2) -> float:
    """max of the two directed distances; symmetric in X and Y."""
    X, Y = as_points(X), as_points(Y)
    _check_nonempty(X, Y)
    d = pairwise_distances(X, Y, norm)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def relaxed_hausdorff(X, Y, norm: NormSpec = L2) -> float:
    """Hausdorff with the max replaced by the mean of nearest-neighbour distances."""
    X, Y = as_points(X), as_points(Y)
    _check_nonempty(X, Y)
    d = pairwise_distances(X, Y, norm)
    return float(0.5 * (d.min(axis=1).mean() + d.min(axis=0).mean()))


def set_distance(X, Y, norm: NormSpec = L2) -> float:
    """inf-inf distance between two point sets."""
    X, Y = as_points(X), as_points(Y)
    _check_nonempty(X, Y)
    return float(pairwise_distances(X, Y, norm).min())


def min_interclass_distance(ds: LabeledDataset, norm: NormSpec = L2) -> float:
    """Smallest set distance over all pairs of distinct classes."""
    classes = ds.classes
    if len(classes) < 2:
        raise DataError("interclass distance needs at least two classes")
    best = np.inf
    for i, a in enumerate(classes):
        for b in classes[i + 1 :]:
            best = min(best, set_distance(ds.class_points(a), ds.class_points(b), norm))
    return float(best)


def is_separated(ds: LabeledDataset, eps: float, norm: NormSpec = L2) -> bool:
    """Whether closed eps-balls around different-class points are pairwise disjoint.

    Balls touching at exactly 2*eps count as not separated.
    """
    if eps < 0:
        raise DataError("eps must be non-negative")
    return min_interclass_distance(ds, norm) > 2.0 * eps
