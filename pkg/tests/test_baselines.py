"""Random and k-center baselines against the exact solver and each other."""

import numpy as np
import pytest

from mincover import (
    L2,
    BaselineSpec,
    BlobSpec,
    InfeasibleError,
    LabeledDataset,
    SolverConfig,
    compare_methods,
    gen_blobs,
    kcenter_greedy,
    random_coreset,
    solve_k_mcs,
    verify_cover,
)

EXACT = SolverConfig(mode="exact")


def single_class(points):
    return LabeledDataset(points, np.zeros(len(points), dtype=np.int64))


def random_ds(seed, n=16, classes=2):
    rng = np.random.default_rng(seed)
    return LabeledDataset(rng.uniform(0, 1, size=(n, 2)), rng.integers(0, classes, size=n))


class TestRandomCoreset:
    def test_full_budget_returns_dataset(self):
        ds = random_ds(0, n=10)
        budget = min(len(ix) for ix in ds.by_class.values())
        sol = random_coreset(ds, BaselineSpec("random", budget, "per_class", seed=1))
        assert len(sol.selected) == sum(budget for _ in ds.classes)
        full = random_coreset(
            ds, BaselineSpec("random", len(ds), "total", seed=1)
        )
        assert full.selected == list(range(len(ds)))
        assert full.eta == 0.0

    def test_same_seed_same_selection(self):
        ds = random_ds(1)
        spec = BaselineSpec("random", 3, "per_class", seed=9)
        assert random_coreset(ds, spec).selected == random_coreset(ds, spec).selected

    def test_stratified_one_per_class(self):
        ds = random_ds(2, n=20, classes=3)
        sol = random_coreset(ds, BaselineSpec("random", 1, "per_class", seed=0))
        assert sorted(ds.labels[i] for i in sol.selected) == ds.classes

    def test_total_mode_keeps_every_class(self):
        ds = random_ds(3, n=20, classes=4)
        sol = random_coreset(ds, BaselineSpec("random", 5, "total", seed=2))
        assert len(sol.selected) == 5
        assert set(ds.labels[i] for i in sol.selected) == set(ds.classes)

    def test_budget_too_large_rejected(self):
        ds = random_ds(4, n=8)
        with pytest.raises(InfeasibleError):
            random_coreset(ds, BaselineSpec("random", 100, "per_class", seed=0))

    def test_unit_weights_and_valid_cover(self):
        ds = random_ds(5)
        sol = random_coreset(ds, BaselineSpec("random", 2, "per_class", seed=7))
        assert sol.weights == [1] * len(sol.selected)
        assert verify_cover(ds, sol, L2).valid


class TestKCenter:
    def test_full_budget_zero_radius(self):
        ds = random_ds(6, n=12)
        budget = min(len(ix) for ix in ds.by_class.values())
        per_class_full = kcenter_greedy(
            ds, BaselineSpec("kcenter", len(ds), "total", seed=0)
        )
        assert per_class_full.eta == 0.0

    def test_farthest_first_trace(self):
        ds = single_class(np.array([[0.0], [1.0], [2.0]]))
        sol = kcenter_greedy(ds, BaselineSpec("kcenter", 2, "per_class"))
        assert sol.selected == [0, 2]
        assert sol.eta == 1.0

    def test_radius_nonincreasing_in_budget(self):
        ds = single_class(np.random.default_rng(7).uniform(size=(20, 2)))
        radii = [
            kcenter_greedy(ds, BaselineSpec("kcenter", b, "per_class")).eta
            for b in range(1, 12)
        ]
        assert all(a >= b - 1e-12 for a, b in zip(radii, radii[1:]))

    def test_two_approximation_against_exact(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            n = int(rng.integers(4, 12))
            ds = single_class(rng.uniform(0, 1, size=(n, 2)))
            k = int(rng.integers(1, max(2, n // 2)))
            greedy = kcenter_greedy(ds, BaselineSpec("kcenter", k, "per_class"))
            opt = solve_k_mcs(ds, k, L2, cfg=EXACT)
            assert greedy.eta <= 2.0 * opt.eta + 1e-9

    def test_mcs_radius_never_worse_than_kcenter(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            ds = single_class(rng.uniform(0, 1, size=(14, 2)))
            k = int(rng.integers(2, 6))
            greedy = kcenter_greedy(ds, BaselineSpec("kcenter", k, "per_class"))
            opt = solve_k_mcs(ds, k, L2, cfg=EXACT)
            assert opt.eta <= greedy.eta + 1e-5

    def test_valid_cover_at_recorded_radius(self):
        ds = random_ds(10, n=18, classes=3)
        sol = kcenter_greedy(ds, BaselineSpec("kcenter", 2, "per_class"))
        assert verify_cover(ds, sol, L2).valid


class TestCompareMethods:
    @staticmethod
    def blob_pair():
        train = gen_blobs(
            BlobSpec(centers=np.array([[0.0, 0.0], [10.0, 0.0]]), spread=1.0,
                     samples_per_class=30, seed=0)
        )
        test = gen_blobs(
            BlobSpec(centers=np.array([[0.0, 0.0], [10.0, 0.0]]), spread=1.0,
                     samples_per_class=50, seed=1)
        )
        return train, test

    def test_full_budget_mcs_matches_full_dataset_scores(self):
        train_ds, test_ds = self.blob_pair()
        rows = compare_methods(
            train_ds, test_ds,
            [BaselineSpec("mcs", len(train_ds), "total", seed=0),
             BaselineSpec("random", len(train_ds), "total", seed=0)],
            eps=0.5, norm=L2, repeats=1, solver_cfg=EXACT,
        )
        assert rows[0]["coreset_size"] == len(train_ds)
        # at full budget both coresets are the dataset itself, same training seed
        assert rows[0]["std_score_mean"] == rows[1]["std_score_mean"]
        assert rows[0]["rob_score_mean"] == rows[1]["rob_score_mean"]

    def test_repeat_statistics_populated(self):
        train_ds, test_ds = self.blob_pair()
        rows = compare_methods(
            train_ds, test_ds, [BaselineSpec("random", 3, "per_class", seed=4)],
            eps=0.5, norm=L2, repeats=3, solver_cfg=EXACT,
        )
        assert rows[0]["repeats"] == 3
        assert rows[0]["std_score_std"] >= 0.0

    def test_margin_dominates_eps_scores_high(self):
        train_ds, test_ds = self.blob_pair()
        specs = [
            BaselineSpec("mcs", 4, "per_class", seed=0),
            BaselineSpec("random", 4, "per_class", seed=0),
            BaselineSpec("kcenter", 4, "per_class", seed=0),
        ]
        rows = compare_methods(
            train_ds, test_ds, specs, eps=0.5, norm=L2, repeats=2, solver_cfg=EXACT
        )
        for row in rows:
            assert row["rob_score_mean"] >= 0.95, row
