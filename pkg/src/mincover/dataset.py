"""Labeled point sets and norm specifications."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

_VALID_P = (1.0, 2.0, float("inf"))
_P_NAMES = {1.0: "l1", 2.0: "l2", float("inf"): "linf"}


@dataclass(frozen=True)
class NormSpec:
    """Which lp norm (p in {1, 2, inf}) defines all distances in a computation."""

    p: float = 2.0

    def __post_init__(self):
        if float(self.p) not in _VALID_P:
            raise DataError(f"unsupported norm p={self.p}; expected 1, 2 or inf")
        object.__setattr__(self, "p", float(self.p))

    @property
    def dual(self) -> float:
        """Dual exponent q with 1/p + 1/q = 1."""
        if self.p == 1.0:
            return float("inf")
        if self.p == np.inf:
            return 1.0
        return 2.0

    @property
    def name(self) -> str:
        return _P_NAMES[self.p]

    @classmethod
    def from_name(cls, name: str) -> "NormSpec":
        for p, n in _P_NAMES.items():
            if n == name:
                return cls(p)
        raise DataError(f"unknown norm name {name!r}; expected one of l1, l2, linf")


L1 = NormSpec(1.0)
L2 = NormSpec(2.0)
LINF = NormSpec(float("inf"))


def as_points(arr) -> np.ndarray:
    """Coerce to a finite float64 (N, n) array; a single point becomes (1, n)."""
    pts = np.asarray(arr, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2 or pts.shape[1] < 1:
        raise DataError(f"expected points of shape (N, n), got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise DataError("points contain NaN or Inf")
    return pts


@dataclass
class LabeledDataset:
    """N points in R^n with integer class labels."""

    points: np.ndarray
    labels: np.ndarray
    by_class: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.points = as_points(self.points)
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if len(self.points) != len(self.labels):
            raise DataError(
                f"{len(self.points)} points but {len(self.labels)} labels"
            )
        if len(self.points) < 1:
            raise DataError("dataset must contain at least one point")
        if self.labels.min() < 0:
            raise DataError("labels must be non-negative integers")
        self.by_class = {
            int(c): np.flatnonzero(self.labels == c) for c in np.unique(self.labels)
        }
        seen = {}
        for i, row in enumerate(self.points):
            key = row.tobytes()
            label = int(self.labels[i])
            if seen.setdefault(key, label) != label:
                raise DataError(
                    f"point {i} duplicates an earlier point with a different label"
                )

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def classes(self) -> list:
        return sorted(self.by_class)

    @property
    def n_classes(self) -> int:
        return len(self.by_class)

    def class_points(self, label: int) -> np.ndarray:
        return self.points[self.by_class[label]]

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.points[idx], self.labels[idx])
