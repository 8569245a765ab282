"""Alternative compression baselines and the score-comparison harness.

Random selection and farthest-first k-center produce CoverSolutions at their
achieved radius, so everything downstream (verification, plotting, training)
treats them uniformly with minimal coresets.
"""

from dataclasses import dataclass

import numpy as np

from .attacks import AttackConfig
from .covering import CoverSolution, SolverConfig, compute_weights, solve_k_mcs, verify_cover
from .dataset import LabeledDataset, NormSpec, L2
from .errors import DataError, InfeasibleError, MincoverError
from .metrics import pairwise_distances
from .rng import SplitMix64
from .training import TrainConfig, accuracy, train

METHODS = ("random", "kcenter", "mcs")


@dataclass
class BaselineSpec:
    method: str
    budget: int
    budget_mode: str = "per_class"
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise DataError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.budget_mode not in ("per_class", "total"):
            raise DataError(f"unknown budget mode {self.budget_mode!r}")
        if self.budget < 1:
            raise DataError("budget must be >= 1")


def _check_budget(ds: LabeledDataset, spec: BaselineSpec):
    if spec.budget_mode == "per_class":
        small = [c for c, ix in ds.by_class.items() if len(ix) < spec.budget]
        if small:
            raise InfeasibleError(
                f"budget {spec.budget} exceeds the size of class(es) {small}"
            )
    else:
        if spec.budget < ds.n_classes:
            raise InfeasibleError(
                f"total budget {spec.budget} below class count {ds.n_classes}"
            )
        if spec.budget > len(ds):
            raise InfeasibleError(f"total budget {spec.budget} exceeds dataset size")


def _finish(ds: LabeledDataset, selected, norm: NormSpec, solver: str) -> CoverSolution:
    per_class = {}
    for c in ds.classes:
        per_class[c] = CoverSolution(
            selected=[i for i in selected if ds.labels[i] == c],
            eta=0.0,
            weights=None,
            solver=solver,
        )
    sol = CoverSolution(selected=sorted(selected), eta=0.0, weights=None, solver=solver,
                        per_class=per_class)
    achieved = verify_cover(ds, sol, norm).achieved_radius
    sol.eta = achieved
    for sub in per_class.values():
        sub.eta = achieved
    sol.weights = [1] * len(sol.selected)
    return sol


def random_coreset(ds: LabeledDataset, spec: BaselineSpec, norm: NormSpec = L2) -> CoverSolution:
    """Uniform selection without replacement, stratified per class by default.

    Total mode first takes one uniform point per class (a valid cover needs
    every class represented), then fills the rest uniformly from the
    remainder. Weights are all 1; eta records the achieved radius d(T -> S).
    """
    _check_budget(ds, spec)
    g = SplitMix64(spec.seed)
    selected = []
    if spec.budget_mode == "per_class":
        for c in ds.classes:
            idx = ds.by_class[c]
            selected.extend(int(idx[i]) for i in g.sample(len(idx), spec.budget))
    else:
        for c in ds.classes:
            idx = ds.by_class[c]
            selected.append(int(idx[g.below(len(idx))]))
        rest = np.setdiff1d(np.arange(len(ds)), np.array(selected))
        extra = spec.budget - len(selected)
        selected.extend(int(rest[i]) for i in g.sample(len(rest), extra))
    return _finish(ds, selected, norm, "random")


def kcenter_greedy(ds: LabeledDataset, spec: BaselineSpec, norm: NormSpec = L2) -> CoverSolution:
    """Farthest-first traversal per class (the classic 2-approximation).

    Seeds each class with its lowest index; per-class mode then adds the
    farthest point of that class until the budget. Total mode seeds every
    class and repeatedly adds the globally farthest point from its own
    class's selection (ties to the lowest index).
    """
    _check_budget(ds, spec)
    dist_to_sel = np.full(len(ds), np.inf)
    selected = []

    def add(i: int):
        selected.append(i)
        d = pairwise_distances(ds.points, ds.points[[i]], norm)[:, 0]
        same = ds.labels == ds.labels[i]
        np.minimum(dist_to_sel, np.where(same, d, np.inf), out=dist_to_sel)

    for c in ds.classes:
        add(int(ds.by_class[c][0]))
    if spec.budget_mode == "per_class":
        counts = {c: 1 for c in ds.classes}
        for c in ds.classes:
            idx = ds.by_class[c]
            while counts[c] < spec.budget:
                local = dist_to_sel[idx]
                far = int(idx[np.argmax(local)])  # argmax ties -> lowest index
                add(far)
                counts[c] += 1
    else:
        while len(selected) < spec.budget:
            add(int(np.argmax(dist_to_sel)))
    return _finish(ds, selected, norm, "kcenter")


def build_coreset(
    ds: LabeledDataset,
    spec: BaselineSpec,
    norm: NormSpec = L2,
    solver_cfg: SolverConfig | None = None,
) -> CoverSolution:
    """Dispatch: random, k-center, or the minimal coreset at budget k."""
    if spec.method == "random":
        return random_coreset(ds, spec, norm)
    if spec.method == "kcenter":
        return kcenter_greedy(ds, spec, norm)
    _check_budget(ds, spec)
    sol = solve_k_mcs(ds, spec.budget, norm, cfg=solver_cfg, budget_mode=spec.budget_mode)
    return sol


def compare_methods(
    train_ds: LabeledDataset,
    test_ds: LabeledDataset,
    specs,
    eps: float,
    norm: NormSpec = L2,
    train_cfg: TrainConfig | None = None,
    attack: AttackConfig | None = None,
    repeats: int = 3,
    solver_cfg: SolverConfig | None = None,
):
    """Standard and robust scores per compression method.

    Per method and repeat: compress the training set, fit a standard model on
    the coreset and an adversarially trained one (the weighted generalized
    objective for mcs, classical adversarial for the baselines), then score
    standard accuracy of the former and robust accuracy of the latter on the
    held-out set. Rows carry mean and sample standard deviation over repeats.
    """
    if train_ds.dim != test_ds.dim:
        raise DataError("train and test dimensions differ")
    attack = attack or AttackConfig(eps=eps, alpha=max(eps / 4, 1e-3), steps=10, norm=norm)
    base = train_cfg or TrainConfig()
    rows = []
    for spec in specs:
        std_scores, rob_scores, sizes, radii = [], [], [], []
        try:
            for r in range(repeats):
                rspec = BaselineSpec(spec.method, spec.budget, spec.budget_mode, spec.seed + r)
                sol = build_coreset(train_ds, rspec, norm, solver_cfg)
                coreset = train_ds.subset(sol.selected)
                seed = base.seed + r
                std_cfg = TrainConfig(base.learning_rate, base.epochs, seed, "standard")
                std_model = train(coreset, std_cfg).model
                if spec.method == "mcs":
                    adv_cfg = TrainConfig(
                        base.learning_rate, base.epochs, seed, "generalized_adversarial",
                        attack=attack, total_count_n=len(train_ds),
                    )
                    adv_model = train(train_ds, adv_cfg, cover=sol).model
                else:
                    adv_cfg = TrainConfig(
                        base.learning_rate, base.epochs, seed, "adversarial", attack=attack
                    )
                    adv_model = train(coreset, adv_cfg).model
                std_scores.append(accuracy(std_model, test_ds))
                rob_scores.append(accuracy(adv_model, test_ds, eps=eps, norm=norm))
                sizes.append(sol.size)
                radii.append(sol.eta)
        except MincoverError as exc:
            raise MincoverError(f"method {spec.method!r} failed: {exc}") from exc
        std_arr, rob_arr = np.array(std_scores), np.array(rob_scores)
        rows.append(
            {
                "method": spec.method,
                "budget": spec.budget,
                "budget_mode": spec.budget_mode,
                "coreset_size": int(np.mean(sizes)),
                "radius": float(np.mean(radii)),
                "repeats": repeats,
                "std_score_mean": float(std_arr.mean()),
                "std_score_std": float(std_arr.std(ddof=1)) if repeats > 1 else 0.0,
                "rob_score_mean": float(rob_arr.mean()),
                "rob_score_std": float(rob_arr.std(ddof=1)) if repeats > 1 else 0.0,
            }
        )
    return rows
