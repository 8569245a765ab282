"""Generators: distribution supports, separation guarantees, reproducibility."""

import numpy as np
import pytest

from mincover import (
    L2,
    BlobSpec,
    DataError,
    TradeoffDistSpec,
    accuracy,
    gen_blobs,
    gen_tradeoff,
    gen_uniform_2d,
    is_separated,
    min_interclass_distance,
    reference_classifiers,
)
from mincover.rng import SplitMix64, raw_stream


class TestSplitMix:
    def test_known_reference_outputs(self):
        # published splitmix64 sequence for seed 0
        g = SplitMix64(0)
        assert [g.next_u64() for _ in range(3)] == [
            0xE220A8397B1DCDAF,
            0x6E789E6AA1B965F4,
            0x06C45D188009454F,
        ]

    def test_scalar_and_vector_paths_agree(self):
        g1, g2 = SplitMix64(99), SplitMix64(99)
        scalars = [g1.next_u64() for _ in range(8)]
        assert scalars == list(g2._take(8))
        assert list(raw_stream(99, 0, 8)) == scalars

    def test_uniforms_in_unit_interval(self):
        u = SplitMix64(5).uniforms(1000)
        assert u.min() >= 0.0 and u.max() < 1.0

    def test_normals_have_sane_moments(self):
        z = SplitMix64(6).normals(20000)
        assert abs(z.mean()) < 0.05
        assert abs(z.std() - 1.0) < 0.05

    def test_sample_without_replacement(self):
        picked = SplitMix64(7).sample(10, 6)
        assert len(set(picked.tolist())) == 6
        assert all(0 <= i < 10 for i in picked)


class TestTradeoff:
    def test_degenerate_coin_at_p_one(self):
        ds = gen_tradeoff(TradeoffDistSpec(p=1.0, n=3, samples=500, seed=0))
        signs = np.where(ds.labels > 0, 1.0, -1.0)
        assert np.array_equal(ds.points[:, 0], signs)

    def test_conditional_feature_supports(self):
        ds = gen_tradeoff(TradeoffDistSpec(p=0.7, n=4, samples=2000, seed=1))
        pos = ds.points[ds.labels == 1]
        neg = ds.points[ds.labels == 0]
        assert pos[:, 1:].min() >= 0.0 and pos[:, 1:].max() <= 1.0
        assert neg[:, 1:].min() >= -1.0 and neg[:, 1:].max() <= 0.0

    def test_coin_frequency_concentrates(self):
        ds = gen_tradeoff(TradeoffDistSpec(p=0.8, n=2, samples=100_000, seed=2))
        signs = np.where(ds.labels > 0, 1.0, -1.0)
        freq = float((ds.points[:, 0] == signs).mean())
        assert freq == pytest.approx(0.8, abs=0.01)

    def test_dim_is_n_plus_one(self):
        ds = gen_tradeoff(TradeoffDistSpec(p=0.6, n=10, samples=50, seed=3))
        assert ds.dim == 11

    def test_seed_reproducibility(self):
        spec = TradeoffDistSpec(p=0.75, n=3, samples=100, seed=11)
        a, b = gen_tradeoff(spec), gen_tradeoff(spec)
        assert np.array_equal(a.points, b.points)
        assert np.array_equal(a.labels, b.labels)

    def test_invalid_spec(self):
        with pytest.raises(DataError):
            TradeoffDistSpec(p=0.4, n=3, samples=10)


class TestReferenceClassifiers:
    def test_accurate_classifier_is_perfect_but_fragile(self):
        spec = TradeoffDistSpec(p=0.8, n=10, samples=20_000, seed=4)
        ds = gen_tradeoff(spec)
        f_acc, _ = reference_classifiers(spec)
        assert accuracy(f_acc, ds) == 1.0
        from mincover.dataset import LINF

        assert accuracy(f_acc, ds, eps=1.0 - 1e-9, norm=LINF) == 0.0

    def test_robust_classifier_scores_p_both_ways(self):
        spec = TradeoffDistSpec(p=0.8, n=10, samples=50_000, seed=5)
        ds = gen_tradeoff(spec)
        _, f_rob = reference_classifiers(spec)
        from mincover.dataset import LINF

        std = accuracy(f_rob, ds)
        rob = accuracy(f_rob, ds, eps=1.0 - 1e-9, norm=LINF)
        assert std == pytest.approx(0.8, abs=0.01)
        assert rob == std  # x1 = +/-1, so any eps < 1 leaves the sign alone


class TestBlobs:
    def test_separated_by_construction(self):
        spec = BlobSpec(centers=np.array([[0.0, 0.0], [10.0, 0.0]]), spread=1.0,
                        samples_per_class=40, seed=0)
        ds = gen_blobs(spec)
        # any eps below (gap - 2*spread)/2 = 4 keeps the fattened classes apart
        assert is_separated(ds, 3.99, L2)

    def test_sample_counts_honored(self):
        spec = BlobSpec(centers=np.array([[0.0, 0.0], [9.0, 0.0], [0.0, 9.0]]),
                        spread=1.0, samples_per_class=17, seed=1)
        ds = gen_blobs(spec)
        assert all(len(ds.by_class[c]) == 17 for c in ds.classes)

    def test_interclass_distance_lower_bound(self):
        spec = BlobSpec(centers=np.array([[0.0, 0.0], [10.0, 0.0]]), spread=1.0,
                        samples_per_class=60, seed=2)
        ds = gen_blobs(spec)
        assert min_interclass_distance(ds, L2) >= 8.0

    def test_center_spread_invariant_enforced(self):
        with pytest.raises(DataError):
            BlobSpec(centers=np.array([[0.0, 0.0], [1.0, 0.0]]), spread=1.0,
                     samples_per_class=5)

    def test_seed_reproducibility(self):
        spec = BlobSpec(centers=np.array([[0.0, 0.0], [8.0, 0.0]]), spread=1.0,
                        samples_per_class=25, seed=3)
        assert np.array_equal(gen_blobs(spec).points, gen_blobs(spec).points)


class TestUniform2d:
    def test_unit_square_support(self):
        pts = gen_uniform_2d(500, seed=0)
        assert pts.shape == (500, 2)
        assert pts.min() >= 0.0 and pts.max() < 1.0

    def test_seed_reproducibility(self):
        assert np.array_equal(gen_uniform_2d(50, seed=4), gen_uniform_2d(50, seed=4))

    def test_different_seeds_differ(self):
        assert not np.array_equal(gen_uniform_2d(50, seed=1), gen_uniform_2d(50, seed=2))
