"""Command-line surface: compress, verify-bound, compare, gen-data, plot.

stdout carries nothing but the run-report path; diagnostics go to stderr.
Exit codes: 0 success, 2 bad flags or unparseable inputs, 3 infeasible
budgets or invalid covers, 4 solver node limit (incumbent cover saved).
Every command writes a RunReport whose config snapshot reproduces the run.
"""

import argparse
import sys
import time

import numpy as np

from . import __version__
from .attacks import AttackConfig
from .baselines import BaselineSpec, compare_methods
from .covering import SolverConfig, compute_weights, solve_eta_mcs, solve_k_mcs, verify_cover
from .datagen import BlobSpec, TradeoffDistSpec, gen_blobs, gen_tradeoff, gen_uniform_2d
from .dataset import LabeledDataset, NormSpec
from .errors import (
    CoverInvalidError,
    DataError,
    DatasetParseError,
    InfeasibleError,
    MincoverError,
    NodeLimitError,
)
from .io import RunReport, load_cover, load_dataset, save_cover, save_dataset
from .losses import verify_bound
from .models import LinearModel
from .plotting import cover_svg
from .rng import SplitMix64
from .training import TrainConfig


def _norm(name: str) -> NormSpec:
    return NormSpec.from_name(name)


def _mode(flag: str) -> str:
    return flag.replace("-", "_")


def _report_path(args, default_base: str) -> str:
    return args.report if args.report else default_base + ".report.json"


def _emit(report: RunReport, path: str) -> None:
    report.save(path)
    print(path)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mincover", description=__doc__)
    p.add_argument("--version", action="version", version=f"mincover {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compress", help="compute a minimal coreset of a dataset")
    c.add_argument("--input", required=True, help="dataset file (.csv or .bin)")
    c.add_argument("--norm", default="l2", choices=["l1", "l2", "linf"])
    grp = c.add_mutually_exclusive_group(required=True)
    grp.add_argument("--eta", type=float, help="fixed covering radius (minimize size)")
    grp.add_argument("--k", type=int, help="fixed budget (minimize radius)")
    c.add_argument("--budget-mode", default="total", choices=["per-class", "total"])
    c.add_argument("--solver", default="auto", choices=["exact", "greedy", "auto"])
    c.add_argument("--delta", type=float, default=1e-5, help="radius bisection tolerance")
    c.add_argument("--node-limit", type=int, default=2_000_000)
    c.add_argument("--partition-weights", action="store_true",
                   help="assign each point to one nearest ball instead of counting overlaps")
    c.add_argument("--out", required=True, help="cover solution file (json)")
    c.add_argument("--report", default=None)
    c.set_defaults(func=cmd_compress)

    v = sub.add_parser("verify-bound", help="certify the coreset adversarial-loss bound")
    v.add_argument("--dataset", required=True)
    v.add_argument("--cover", required=True)
    v.add_argument("--eps", type=float, required=True)
    v.add_argument("--norm", default=None, choices=["l1", "l2", "linf"],
                   help="defaults to the norm embedded in the cover file")
    v.add_argument("--models", type=int, default=100, help="number of random linear models")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--report", default=None)
    v.set_defaults(func=cmd_verify_bound)

    m = sub.add_parser("compare", help="standard/robust scores of compression methods")
    m.add_argument("--train", required=True)
    m.add_argument("--test", required=True)
    m.add_argument("--methods", default="mcs,random,kcenter",
                   help="comma-separated subset of mcs,random,kcenter")
    m.add_argument("--budget", type=int, required=True)
    m.add_argument("--budget-mode", default="per-class", choices=["per-class", "total"])
    m.add_argument("--repeats", type=int, default=3)
    m.add_argument("--eps", type=float, required=True)
    m.add_argument("--norm", default="l2", choices=["l1", "l2", "linf"])
    m.add_argument("--alpha", type=float, default=None,
                   help="PGD step size (defaults to eps/4; 0.1 suits unit-scale data)")
    m.add_argument("--steps", type=int, default=10)
    m.add_argument("--lr", type=float, default=0.5)
    m.add_argument("--epochs", type=int, default=200)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", required=True, help="comparison table (csv)")
    m.add_argument("--report", default=None)
    m.set_defaults(func=cmd_compare)

    g = sub.add_parser("gen-data", help="write a synthetic dataset")
    gsub = g.add_subparsers(dest="generator", required=True)

    gt = gsub.add_parser("tradeoff", help="accuracy/robustness trade-off distribution")
    gt.add_argument("--p", type=float, required=True)
    gt.add_argument("--n", type=int, required=True, help="clean feature count (dim = n+1)")
    gt.add_argument("--samples", type=int, required=True)
    gt.add_argument("--seed", type=int, default=0)
    gt.add_argument("--out", required=True)
    gt.add_argument("--report", default=None)
    gt.set_defaults(func=cmd_gen_data)

    gb = gsub.add_parser("blobs", help="separated gaussian class clusters")
    gb.add_argument("--classes", type=int, default=2)
    gb.add_argument("--dim", type=int, default=2)
    gb.add_argument("--center-scale", type=float, default=10.0)
    gb.add_argument("--centers", default=None,
                    help="explicit centers 'x,y;x,y;...' (overrides --classes/--dim)")
    gb.add_argument("--spread", type=float, default=1.0)
    gb.add_argument("--min-separation", type=float, default=0.0)
    gb.add_argument("--samples-per-class", type=int, required=True)
    gb.add_argument("--seed", type=int, default=0)
    gb.add_argument("--out", required=True)
    gb.add_argument("--report", default=None)
    gb.set_defaults(func=cmd_gen_data)

    gu = gsub.add_parser("uniform2d", help="uniform points in the unit square")
    gu.add_argument("--count", type=int, required=True)
    gu.add_argument("--seed", type=int, default=0)
    gu.add_argument("--out", required=True)
    gu.add_argument("--report", default=None)
    gu.set_defaults(func=cmd_gen_data)

    pl = sub.add_parser("plot", help="render a 2-d cover as svg")
    pl.add_argument("--dataset", required=True)
    pl.add_argument("--cover", required=True)
    pl.add_argument("--out", required=True)
    pl.add_argument("--report", default=None)
    pl.set_defaults(func=cmd_plot)
    return p


def cmd_compress(args) -> int:
    ds = load_dataset(args.input)
    norm = _norm(args.norm)
    cfg = SolverConfig(mode=args.solver, exact_node_limit=args.node_limit)
    config = {
        "input": args.input, "norm": args.norm, "eta": args.eta, "k": args.k,
        "budget_mode": args.budget_mode, "solver": args.solver, "delta": args.delta,
        "node_limit": args.node_limit, "partition_weights": bool(args.partition_weights),
        "out": args.out,
    }
    t0 = time.perf_counter()
    try:
        if args.eta is not None:
            if args.eta < 0:
                raise DataError("--eta must be non-negative")
            sol = solve_eta_mcs(ds, args.eta, norm, cfg)
        else:
            sol = solve_k_mcs(ds, args.k, norm, args.delta, cfg, _mode(args.budget_mode))
    except NodeLimitError as exc:
        sol = exc.incumbent
        save_cover(sol, norm, args.out)
        report = RunReport(
            command="compress", config=config, version=__version__,
            payload={"node_limit_hit": True, "incumbent_size": sol.size, "eta": sol.eta},
            timings={"solve_sec": time.perf_counter() - t0},
        )
        _emit(report, _report_path(args, args.out))
        print(f"error: {exc}; incumbent cover saved to {args.out}", file=sys.stderr)
        return 4
    if args.partition_weights:
        sol.weights = compute_weights(ds, sol, norm, partition=True)
    solve_sec = time.perf_counter() - t0
    save_cover(sol, norm, args.out)
    check = verify_cover(ds, sol, norm)
    report = RunReport(
        command="compress", config=config, version=__version__,
        payload={
            "out_file": args.out, "size": sol.size, "eta": sol.eta,
            "selected": list(sol.selected), "weights": list(sol.weights),
            "solver": sol.solver, "norm": norm.name,
            "valid": check.valid, "achieved_radius": check.achieved_radius,
            "per_class_sizes": {str(c): len(s.selected) for c, s in sol.per_class.items()},
        },
        timings={"solve_sec": solve_sec},
    )
    _emit(report, _report_path(args, args.out))
    return 0


def cmd_verify_bound(args) -> int:
    ds = load_dataset(args.dataset)
    sol, embedded_norm = load_cover(args.cover)
    norm = _norm(args.norm) if args.norm else embedded_norm
    if ds.n_classes != 2 or set(ds.classes) != {0, 1}:
        raise DataError("bound certification needs a binary dataset with labels {0,1}")
    check = verify_cover(ds, sol, norm)
    if not check.valid:
        raise CoverInvalidError(
            f"cover is invalid at eta={sol.eta}; first violations {check.violations[:5]}"
        )
    config = {
        "dataset": args.dataset, "cover": args.cover, "eps": args.eps,
        "norm": norm.name, "models": args.models, "seed": args.seed,
    }
    gen = SplitMix64(args.seed)
    t0 = time.perf_counter()
    results = []
    for _ in range(args.models):
        w = gen.normals(ds.dim)
        b = float(gen.normals(1)[0])
        rep = verify_bound(LinearModel(w, b), ds, sol, args.eps, norm)
        results.append(
            {"lhs": rep.lhs, "rhs": rep.rhs, "gap": rep.gap, "holds": rep.holds}
        )
    report = RunReport(
        command="verify-bound", config=config, version=__version__,
        seeds={"models": args.seed},
        payload={
            "eps": args.eps, "eta": sol.eta, "norm": norm.name,
            "models": results,
            "holds_for_all": all(r["holds"] for r in results),
            "min_gap": min(r["gap"] for r in results),
        },
        timings={"verify_sec": time.perf_counter() - t0},
    )
    _emit(report, _report_path(args, args.cover + ".verify"))
    return 0


def cmd_compare(args) -> int:
    train_ds = load_dataset(args.train)
    test_ds = load_dataset(args.test)
    norm = _norm(args.norm)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    specs = [BaselineSpec(m, args.budget, _mode(args.budget_mode), args.seed) for m in methods]
    alpha = args.alpha if args.alpha is not None else max(args.eps / 4, 1e-3)
    attack = AttackConfig(eps=args.eps, alpha=alpha, steps=args.steps, norm=norm)
    train_cfg = TrainConfig(args.lr, args.epochs, args.seed, "standard")
    config = {
        "train": args.train, "test": args.test, "methods": args.methods,
        "budget": args.budget, "budget_mode": args.budget_mode, "repeats": args.repeats,
        "eps": args.eps, "norm": args.norm, "alpha": alpha, "steps": args.steps,
        "lr": args.lr, "epochs": args.epochs, "seed": args.seed, "out": args.out,
    }
    t0 = time.perf_counter()
    rows = compare_methods(
        train_ds, test_ds, specs, eps=args.eps, norm=norm,
        train_cfg=train_cfg, attack=attack, repeats=args.repeats,
    )
    cols = list(rows[0].keys())
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(repr(row[c]) if isinstance(row[c], float) else str(row[c])
                              for c in cols))
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    report = RunReport(
        command="compare", config=config, version=__version__,
        seeds={"base": args.seed},
        payload={"rows": rows, "table_file": args.out},
        timings={"compare_sec": time.perf_counter() - t0},
    )
    _emit(report, _report_path(args, args.out))
    return 0


def _blob_centers(args) -> np.ndarray:
    if args.centers:
        try:
            rows = [[float(v) for v in part.split(",")] for part in args.centers.split(";")]
            return np.array(rows, dtype=np.float64)
        except ValueError:
            raise DataError(f"cannot parse --centers {args.centers!r}") from None
    k, dim, scale = args.classes, args.dim, args.center_scale
    if dim < 1 or k < 2:
        raise DataError("blobs need --classes >= 2 and --dim >= 1")
    centers = np.zeros((k, dim))
    if dim == 1:
        centers[:, 0] = (2 * np.arange(k) - (k - 1)) * scale
    else:
        angles = 2 * np.pi * np.arange(k) / k
        centers[:, 0] = scale * np.cos(angles)
        centers[:, 1] = scale * np.sin(angles)
    return centers


def cmd_gen_data(args) -> int:
    t0 = time.perf_counter()
    if args.generator == "tradeoff":
        spec = TradeoffDistSpec(p=args.p, n=args.n, samples=args.samples, seed=args.seed)
        ds = gen_tradeoff(spec)
        config = {"generator": "tradeoff", "p": args.p, "n": args.n,
                  "samples": args.samples, "seed": args.seed, "out": args.out}
    elif args.generator == "blobs":
        centers = _blob_centers(args)
        spec = BlobSpec(centers=centers, spread=args.spread,
                        samples_per_class=args.samples_per_class, seed=args.seed,
                        min_separation=args.min_separation)
        ds = gen_blobs(spec)
        config = {"generator": "blobs", "classes": len(centers), "dim": centers.shape[1],
                  "center_scale": args.center_scale, "centers": args.centers,
                  "spread": args.spread, "min_separation": args.min_separation,
                  "samples_per_class": args.samples_per_class, "seed": args.seed,
                  "out": args.out}
    else:
        pts = gen_uniform_2d(args.count, args.seed)
        ds = LabeledDataset(pts, np.zeros(len(pts), dtype=np.int64))
        config = {"generator": "uniform2d", "count": args.count, "seed": args.seed,
                  "out": args.out}
    save_dataset(ds, args.out)
    report = RunReport(
        command="gen-data", config=config, version=__version__,
        seeds={"data": args.seed},
        payload={"out_file": args.out, "count": len(ds), "dim": ds.dim,
                 "classes": ds.n_classes},
        timings={"gen_sec": time.perf_counter() - t0},
    )
    _emit(report, _report_path(args, args.out))
    return 0


def cmd_plot(args) -> int:
    ds = load_dataset(args.dataset)
    sol, norm = load_cover(args.cover)
    svg = cover_svg(ds.points, ds.labels, sol, norm)
    with open(args.out, "w") as fh:
        fh.write(svg)
    config = {"dataset": args.dataset, "cover": args.cover, "out": args.out}
    report = RunReport(
        command="plot", config=config, version=__version__,
        payload={"out_file": args.out, "balls": len(sol.selected), "eta": sol.eta},
    )
    _emit(report, _report_path(args, args.out))
    return 0


def argv_from_config(command: str, config: dict) -> list:
    """Rebuild the argv of a run from its report's config snapshot."""
    argv = [command] if command != "gen-data" else ["gen-data", config["generator"]]
    skip = {"generator"}
    for key, value in config.items():
        if key in skip or value is None:
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        else:
            argv.extend([flag, str(value)])
    return argv


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except DatasetParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleError, CoverInvalidError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NodeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (DataError, MincoverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
