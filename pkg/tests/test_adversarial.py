"""Attacks and losses against closed forms, grid oracles, and the cover bound."""

import numpy as np
import pytest

from mincover import (
    L1,
    L2,
    LINF,
    AttackConfig,
    BlobSpec,
    DataError,
    CoverInvalidError,
    CoverSolution,
    LabeledDataset,
    LinearModel,
    MLPModel,
    SolverConfig,
    attack_config,
    empirical_adv_loss,
    empirical_standard_loss,
    eps2_from_epsinf,
    gen_blobs,
    generalized_adv_loss,
    grid_worst_case_loss,
    linear_worst_case_loss,
    margin_loss,
    pgd_attack,
    solve_eta_mcs,
    verify_bound,
)
from mincover.rng import SplitMix64

EXACT = SolverConfig(mode="exact")


def make_blobs(seed=0, per_class=30):
    spec = BlobSpec(
        centers=np.array([[0.0, 0.0], [10.0, 0.0]]), spread=1.0,
        samples_per_class=per_class, seed=seed,
    )
    return gen_blobs(spec)


class TestEps2Conversion:
    def test_mnist_anchor(self):
        assert eps2_from_epsinf(0.1, 784) == pytest.approx(1.36, abs=0.005)

    def test_cifar_anchor(self):
        assert eps2_from_epsinf(8 / 255, 3072) == pytest.approx(0.84, abs=0.005)

    def test_volume_matching_factor(self):
        for n in (1, 4, 37):
            factor = np.sqrt(2 * n / (np.pi * np.e))
            assert eps2_from_epsinf(0.25, n) == pytest.approx(0.25 * factor, rel=1e-12)

    def test_rejects_bad_inputs(self):
        with pytest.raises(DataError):
            eps2_from_epsinf(0.0, 10)
        with pytest.raises(DataError):
            eps2_from_epsinf(0.1, 0)


class TestMarginLoss:
    def test_zero_margin_is_log_two(self):
        model = LinearModel(np.array([1.0]), 0.0)
        assert margin_loss(model, [0.0], 1) == pytest.approx(np.log(2), rel=1e-12)

    def test_large_margin_vanishes(self):
        model = LinearModel(np.array([1.0]), 0.0)
        assert margin_loss(model, [80.0], 1) < 1e-30

    def test_direct_evaluation(self):
        model = LinearModel(np.array([1.0]), 0.0)
        assert margin_loss(model, [2.0], 1) == pytest.approx(np.log(1 + np.exp(-2)), rel=1e-12)

    def test_signed_label_conventions_agree(self):
        model = LinearModel(np.array([1.0, -0.5]), 0.3)
        x = [0.7, 0.2]
        assert margin_loss(model, x, 0) == margin_loss(model, x, -1)
        assert margin_loss(model, x, 1) == margin_loss(model, x, +1)


class TestLinearWorstCase:
    def test_eps_zero_equals_margin_loss(self):
        model = LinearModel(np.array([2.0, -1.0]), 0.5)
        x = np.array([[0.3, 0.9]])
        direct = margin_loss(model, x[0], 1)
        assert linear_worst_case_loss(model, x, [1], 0.0, LINF)[0] == pytest.approx(direct)

    def test_one_dim_against_dense_grid(self):
        model = LinearModel(np.array([1.0]), 0.0)
        got = linear_worst_case_loss(model, [[2.0]], [1], 0.5, LINF)[0]
        assert got == pytest.approx(np.log(1 + np.exp(-1.5)), rel=1e-12)
        deltas = np.linspace(-0.5, 0.5, 10001)
        grid = np.logaddexp(0, -(2.0 + deltas)).max()
        assert got == pytest.approx(grid, abs=1e-6)

    def test_l2_dual_norm_shift(self):
        model = LinearModel(np.array([3.0, 4.0]), 0.0)
        x = np.array([[1.0, 1.0]])
        margin = 7.0
        got = linear_worst_case_loss(model, x, [1], 1.0, L2)[0]
        assert got == pytest.approx(np.logaddexp(0, -(margin - 5.0)), rel=1e-12)
        rng = np.random.default_rng(0)
        deltas = rng.normal(size=(4000, 2))
        deltas /= np.maximum(np.linalg.norm(deltas, axis=1, keepdims=True), 1.0)
        sampled = np.logaddexp(0, -((x + deltas) @ model.weights)).max()
        assert sampled <= got + 1e-9

    def test_dominates_clean_loss(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            model = LinearModel(rng.normal(size=3), float(rng.normal()))
            x = rng.normal(size=(1, 3))
            y = [int(rng.integers(0, 2))]
            clean = np.logaddexp(0, -(1 if y[0] else -1) * model.scores(x))[0]
            adv = linear_worst_case_loss(model, x, y, 0.4, L2)[0]
            assert adv >= clean - 1e-15

    def test_rejects_multiclass(self):
        model = LinearModel(np.zeros((3, 2)), np.zeros(3))
        with pytest.raises(DataError):
            linear_worst_case_loss(model, [[0.0, 0.0]], [1], 0.1, L2)


class TestPgd:
    def test_eps_zero_returns_start(self):
        model = LinearModel(np.array([1.0, 1.0]), 0.0)
        x = np.array([0.4, -0.2])
        out = pgd_attack(model, x, 1, AttackConfig(eps=0.0, alpha=1.0, steps=5, norm=LINF))
        assert np.array_equal(out, x)

    def test_saturating_step_hits_closed_form(self):
        gen = SplitMix64(42)
        for _ in range(50):
            dim = 3
            model = LinearModel(gen.normals(dim), float(gen.normals(1)[0]))
            x = gen.normals(dim)
            y = int(gen.uniform() < 0.5)
            eps = 0.3
            cfg = AttackConfig(eps=eps, alpha=eps, steps=1, norm=LINF)
            adv = pgd_attack(model, x, y, cfg)
            attacked = margin_loss(model, adv, y)
            closed = linear_worst_case_loss(model, x[None], [y], eps, LINF)[0]
            assert attacked == pytest.approx(closed, abs=1e-9)

    def test_never_worse_than_start(self):
        model = MLPModel.init(2, hidden=6, seed=3)
        gen = SplitMix64(9)
        X = gen.normals(20).reshape(10, 2)
        y = (gen.uniforms(10) < 0.5).astype(int)
        cfg = attack_config(0.25, LINF, steps=8)
        adv = pgd_attack(model, X, y, cfg)
        from mincover.models import batch_loss

        assert np.all(batch_loss(model, adv, y) >= batch_loss(model, X, y) - 1e-12)

    def test_projection_feasibility(self):
        model = MLPModel.init(3, hidden=5, seed=1)
        gen = SplitMix64(5)
        X = gen.normals(30).reshape(10, 3)
        y = (gen.uniforms(10) < 0.5).astype(int)
        for norm in (LINF, L2):
            adv = pgd_attack(model, X, y, attack_config(0.2, norm, steps=15))
            gap = np.linalg.norm(adv - X, ord=norm.p, axis=1)
            assert np.all(gap <= 0.2 + 1e-12)

    def test_loss_nondecreasing_in_eps(self):
        model = LinearModel(np.array([1.5, -2.0]), 0.1)
        x = np.array([0.5, 0.5])
        losses = []
        for eps in (0.0, 0.1, 0.2, 0.4):
            adv = pgd_attack(model, x, 1, attack_config(eps, LINF, steps=5))
            losses.append(margin_loss(model, adv, 1))
        assert all(a <= b + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_l1_norm_rejected(self):
        model = LinearModel(np.array([1.0]), 0.0)
        with pytest.raises(DataError):
            pgd_attack(model, [0.0], 1, AttackConfig(eps=0.1, alpha=0.1, norm=L1))


class TestGridOracle:
    def test_mlp_pgd_below_grid_max(self):
        for seed in range(5):
            model = MLPModel.init(2, hidden=6, seed=seed)
            gen = SplitMix64(seed + 100)
            x = gen.normals(2)
            y = int(gen.uniform() < 0.5)
            eps = 0.3
            adv = pgd_attack(model, x, y, attack_config(eps, LINF, steps=20))
            pgd_loss = margin_loss(model, adv, y)
            grid = grid_worst_case_loss(model, x, y, eps, LINF, points_per_axis=801)
            assert pgd_loss <= grid + 1e-6

    def test_exact_matches_grid_for_linear(self):
        gen = SplitMix64(77)
        for _ in range(10):
            model = LinearModel(gen.normals(2), float(gen.normals(1)[0]))
            x = gen.normals(2)
            y = int(gen.uniform() < 0.5)
            exact = linear_worst_case_loss(model, x[None], [y], 0.2, LINF)[0]
            grid = grid_worst_case_loss(model, x, y, 0.2, LINF, points_per_axis=401)
            assert grid == pytest.approx(exact, abs=1e-6)

    def test_high_dim_rejected(self):
        model = LinearModel(np.ones(4), 0.0)
        with pytest.raises(DataError):
            grid_worst_case_loss(model, np.zeros(4), 1, 0.1, LINF)


class TestEmpiricalLosses:
    def test_standard_loss_is_mean(self):
        ds = make_blobs()
        model = LinearModel(np.array([1.0, 0.0]), -5.0)
        per_point = [margin_loss(model, x, int(y)) for x, y in zip(ds.points, ds.labels)]
        assert empirical_standard_loss(model, ds) == pytest.approx(np.mean(per_point), abs=1e-12)

    def test_adv_at_zero_eps_reduces_to_standard(self):
        ds = make_blobs()
        model = LinearModel(np.array([0.5, 0.2]), -2.0)
        assert empirical_adv_loss(model, ds, 0.0, L2) == pytest.approx(
            empirical_standard_loss(model, ds), abs=1e-12
        )

    def test_adv_dominates_standard(self):
        ds = make_blobs(seed=5)
        gen = SplitMix64(1)
        for _ in range(10):
            model = LinearModel(gen.normals(2), float(gen.normals(1)[0]))
            adv = empirical_adv_loss(model, ds, 0.7, L2)
            assert adv >= empirical_standard_loss(model, ds) - 1e-15

    def test_exact_inner_needs_linear(self):
        ds = make_blobs()
        with pytest.raises(DataError):
            empirical_adv_loss(MLPModel.init(2, seed=0), ds, 0.1, L2, inner="exact_linear")


class TestGeneralizedLoss:
    def test_reduces_to_classical_at_eta_zero(self):
        ds = make_blobs(seed=2)
        sol = solve_eta_mcs(ds, 0.0, L2, EXACT)
        model = LinearModel(np.array([0.8, -0.1]), -4.0)
        lhs = empirical_adv_loss(model, ds, 0.5, L2)
        rhs = generalized_adv_loss(
            model, ds.subset(sol.selected), sol.weights, radius=0.5, total_n=len(ds), norm=L2
        )
        assert rhs == pytest.approx(lhs, abs=1e-12)

    def test_single_weighted_point_unrolls(self):
        # one point with weight N equals the N-fold duplicated classical loss
        x = np.array([[1.0, 2.0]])
        coreset = LabeledDataset(x, [1])
        model = LinearModel(np.array([1.0, 1.0]), 0.0)
        dup = LabeledDataset(np.repeat(x, 5, axis=0), [1] * 5)
        lhs = empirical_adv_loss(model, dup, 0.3, L2)
        rhs = generalized_adv_loss(model, coreset, [5], radius=0.3, total_n=5, norm=L2)
        assert rhs == pytest.approx(lhs, abs=1e-12)

    def test_monotone_in_radius(self):
        ds = make_blobs(seed=3)
        sol = solve_eta_mcs(ds, 0.5, L2, EXACT)
        coreset = ds.subset(sol.selected)
        model = LinearModel(np.array([0.4, 0.3]), -2.0)
        values = [
            generalized_adv_loss(model, coreset, sol.weights, radius=r, total_n=len(ds))
            for r in (0.0, 0.2, 0.5, 1.0)
        ]
        assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))

    def test_requires_weights(self):
        ds = make_blobs()
        with pytest.raises(DataError):
            generalized_adv_loss(
                LinearModel(np.ones(2), 0.0), ds, None, radius=0.1, total_n=len(ds)
            )


class TestVerifyBound:
    def test_eta_zero_control_gap_vanishes(self):
        ds = make_blobs(seed=4)
        sol = solve_eta_mcs(ds, 0.0, L2, EXACT)
        gen = SplitMix64(11)
        for _ in range(10):
            model = LinearModel(gen.normals(2), float(gen.normals(1)[0]))
            rep = verify_bound(model, ds, sol, eps=0.5, norm=L2)
            assert rep.holds and abs(rep.gap) <= 1e-12

    def test_bound_holds_for_random_models(self):
        ds = make_blobs(seed=6)
        gen = SplitMix64(13)
        for eta in (0.3, 0.8):
            sol = solve_eta_mcs(ds, eta, L2, EXACT)
            for _ in range(25):
                model = LinearModel(gen.normals(2), float(gen.normals(1)[0]))
                rep = verify_bound(model, ds, sol, eps=0.5, norm=L2)
                assert rep.holds and rep.gap >= -1e-9

    def test_corrupted_weights_fail_without_error(self):
        ds = make_blobs(seed=7)
        sol = solve_eta_mcs(ds, 0.8, L2, EXACT)
        sol.weights = [0 for _ in sol.weights]  # worst corruption: rhs collapses
        model = LinearModel(np.array([1.0, 0.2]), -5.0)
        rep = verify_bound(model, ds, sol, eps=0.5, norm=L2)
        assert not rep.holds

    def test_invalid_cover_raises(self):
        ds = make_blobs(seed=8)
        sol = solve_eta_mcs(ds, 0.5, L2, EXACT)
        bad = CoverSolution(selected=sol.selected, eta=1e-6, weights=sol.weights, solver="exact")
        with pytest.raises(CoverInvalidError):
            verify_bound(LinearModel(np.ones(2), 0.0), ds, bad, eps=0.5, norm=L2)
