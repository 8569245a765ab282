"""Robustness-aware dataset compression via minimal finite coverings.

Selects minimal coresets of labeled point sets (exact or greedy set cover at
a fixed radius, or minimum radius at a fixed budget), weights each selected
point by the population of its covering ball, and certifies that the weighted
adversarial loss over the coreset at the inflated radius upper-bounds the
classical adversarial loss over the full dataset.
"""

__version__ = "0.1.0"

from .attacks import (
    AttackConfig,
    attack_config,
    eps2_from_epsinf,
    grid_worst_case_loss,
    linear_worst_case_loss,
    pgd_attack,
)
from .baselines import BaselineSpec, build_coreset, compare_methods, kcenter_greedy, random_coreset
from .covering import (
    AdjacencyMatrix,
    CoverReport,
    CoverSolution,
    SolverConfig,
    build_adjacency,
    check_fattening_zip,
    compute_weights,
    exact_min_cover,
    extract_coreset,
    feasible_with_k,
    greedy_cover,
    solve_eta_mcs,
    solve_k_mcs,
    verify_cover,
)
from .datagen import (
    BlobSpec,
    TradeoffDistSpec,
    gen_blobs,
    gen_tradeoff,
    gen_uniform_2d,
    reference_classifiers,
)
from .dataset import L1, L2, LINF, LabeledDataset, NormSpec
from .errors import (
    CoverInvalidError,
    DataError,
    DatasetParseError,
    DivergenceError,
    InfeasibleError,
    MincoverError,
    NodeLimitError,
)
from .losses import BoundReport, empirical_adv_loss, empirical_standard_loss, generalized_adv_loss, verify_bound
from .metrics import (
    directed_distance,
    hausdorff_distance,
    is_separated,
    lp_distance,
    min_interclass_distance,
    relaxed_hausdorff,
)
from .models import LinearModel, MLPModel, margin_loss
from .training import TrainConfig, TrainResult, accuracy, train
