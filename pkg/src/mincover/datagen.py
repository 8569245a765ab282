"""Synthetic datasets for covering demos and bound certification.

Everything is seeded through the SplitMix64 stream (see rng.py) so a seed
reproduces the exact same dataset. Draw order is documented per generator.
"""

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset
from .errors import DataError
from .models import LinearModel
from .rng import SplitMix64


@dataclass
class TradeoffDistSpec:
    """Binary distribution with one noisy robust feature and n clean ones.

    y is uniform on {-1,+1} (stored as labels {0,1}); x1 equals +y with
    probability p, else -y; x2..x_{n+1} are i.i.d. uniform on [0,1] for y=+1
    and [-1,0] for y=-1. Any weighted vote over the clean features is a
    perfect standard classifier but has no robustness at perturbation ~1,
    while sign(x1) gets accuracy p both ways.
    """

    p: float
    n: int
    samples: int
    seed: int = 0

    def __post_init__(self):
        if not 0.5 <= self.p <= 1.0:
            raise DataError("p must lie in [0.5, 1]")
        if self.n < 1:
            raise DataError("n must be >= 1")
        if self.samples < 1:
            raise DataError("samples must be >= 1")


def gen_tradeoff(spec: TradeoffDistSpec) -> LabeledDataset:
    """Sample the trade-off distribution.

    Draw order per sample block: all label coins, then all x1 coins, then the
    uniform feature block row-major.
    """
    g = SplitMix64(spec.seed)
    m, n = spec.samples, spec.n
    y = np.where(g.uniforms(m) < 0.5, 1.0, -1.0)
    x1 = np.where(g.uniforms(m) < spec.p, y, -y)
    feats = g.uniforms(m * n).reshape(m, n)
    feats = feats + (y[:, None] - 1.0) / 2.0  # [0,1] for +1, [-1,0] for -1
    points = np.column_stack([x1, feats])
    labels = (y > 0).astype(np.int64)
    return LabeledDataset(points, labels)


def reference_classifiers(spec: TradeoffDistSpec):
    """The two fixed linear models for the trade-off distribution.

    f_acc votes the clean features with all-ones weights and ignores x1:
    perfect standard accuracy, zero robustness near perturbation 1. f_rob is
    sign(x1): standard and robust accuracy both p.
    """
    w_acc = np.ones(spec.n + 1)
    w_acc[0] = 0.0
    w_rob = np.zeros(spec.n + 1)
    w_rob[0] = 1.0
    return LinearModel(w_acc, 0.0), LinearModel(w_rob, 0.0)


@dataclass
class BlobSpec:
    """Gaussian class clusters with a hard radius bound, guaranteeing separation.

    Samples are rejection-resampled to lie within l2 distance `spread` of
    their center (draw std is spread/3), so classes are eps-separated for any
    eps < (min center gap - 2*spread) / 2. Centers must be further apart than
    2*(spread + min_separation).
    """

    centers: np.ndarray
    spread: float
    samples_per_class: int
    seed: int = 0
    min_separation: float = 0.0

    def __post_init__(self):
        self.centers = np.atleast_2d(np.asarray(self.centers, dtype=np.float64))
        if len(self.centers) < 2:
            raise DataError("blobs need at least two class centers")
        if self.spread <= 0:
            raise DataError("spread must be positive")
        if self.samples_per_class < 1:
            raise DataError("samples_per_class must be >= 1")
        gaps = [
            np.linalg.norm(self.centers[i] - self.centers[j])
            for i in range(len(self.centers))
            for j in range(i + 1, len(self.centers))
        ]
        need = 2.0 * (self.spread + self.min_separation)
        if min(gaps) <= need:
            raise DataError(
                f"closest centers at distance {min(gaps):.4g} but need > {need:.4g} "
                "(2 * (spread + min_separation))"
            )

    @property
    def n_classes(self) -> int:
        return len(self.centers)

    @property
    def dim(self) -> int:
        return self.centers.shape[1]


def gen_blobs(spec: BlobSpec) -> LabeledDataset:
    """Per class (ascending label): draw normal batches, keep the first
    samples_per_class inside the spread ball, in stream order."""
    g = SplitMix64(spec.seed)
    sigma = spec.spread / 3.0
    points, labels = [], []
    for c, center in enumerate(spec.centers):
        kept = []
        while len(kept) < spec.samples_per_class:
            batch = g.normals(spec.samples_per_class * spec.dim).reshape(-1, spec.dim)
            cand = center + sigma * batch
            inside = np.linalg.norm(cand - center, axis=1) <= spec.spread
            kept.extend(cand[inside])
        block = np.array(kept[: spec.samples_per_class])
        points.append(block)
        labels.append(np.full(spec.samples_per_class, c, dtype=np.int64))
    return LabeledDataset(np.vstack(points), np.concatenate(labels))


def gen_uniform_2d(count: int, seed: int = 0) -> np.ndarray:
    """count i.i.d. uniform points in the unit square, row-major draw order."""
    if count < 1:
        raise DataError("count must be >= 1")
    return SplitMix64(seed).uniforms(2 * count).reshape(count, 2)
