"""Minimal-coreset covering: adjacency graphs, exact and greedy set cover,
fixed-budget radius search, cover verification and ball-count weights.

Covers are always solved per class, so selected points keep their labels and
the weighted-loss bound applies; the exact solver is branch and bound over
bitmask balls with a greedy incumbent and a disjoint-neighborhood lower
bound, returning the lexicographically smallest minimum cover.
"""

from dataclasses import dataclass, field

import numpy as np

from .dataset import LabeledDataset, NormSpec, L2, as_points
from .errors import CoverInvalidError, DataError, InfeasibleError, NodeLimitError
from .metrics import pairwise_distances

DEFAULT_DELTA = 1e-5


@dataclass
class AdjacencyMatrix:
    """Boolean ball-membership graph of a point set at radius eta.

    rows[i] lists (sorted) the indices j with d(x_i, x_j) <= eta; the
    relation is symmetric and every diagonal entry is present.
    """

    n: int
    eta: float
    rows: list

    def ball_masks(self) -> list:
        """Rows as bitmask ints, bit j set iff j in rows[i]."""
        masks = []
        for row in self.rows:
            bits = np.zeros(self.n, dtype=np.uint8)
            bits[row] = 1
            packed = np.packbits(bits, bitorder="little").tobytes()
            masks.append(int.from_bytes(packed, "little"))
        return masks


@dataclass
class SolverConfig:
    """How covers get solved: exact branch and bound, greedy, or size-based auto."""

    mode: str = "auto"
    exact_node_limit: int = 2_000_000
    auto_threshold: int = 512

    def __post_init__(self):
        if self.mode not in ("exact", "greedy", "auto"):
            raise DataError(f"unknown solver mode {self.mode!r}")
        if self.exact_node_limit < 1 or self.auto_threshold < 1:
            raise DataError("node limit and auto threshold must be >= 1")

    def resolve(self, max_class_size: int) -> str:
        if self.mode == "auto":
            return "exact" if max_class_size <= self.auto_threshold else "greedy"
        return self.mode


@dataclass
class CoverSolution:
    """A selected-index cover with its radius, ball-count weights and provenance."""

    selected: list
    eta: float
    weights: list | None
    solver: str
    per_class: dict | None = None

    @property
    def size(self) -> int:
        return len(self.selected)


@dataclass
class CoverReport:
    valid: bool
    achieved_radius: float
    violations: list


def build_adjacency(points, eta: float, norm: NormSpec = L2) -> AdjacencyMatrix:
    """Adjacency of a point set w.r.t. radius eta (closed balls)."""
    if eta < 0:
        raise DataError("eta must be non-negative")
    pts = as_points(points)
    within = pairwise_distances(pts, pts, norm) <= eta
    rows = [np.flatnonzero(r) for r in within]
    return AdjacencyMatrix(n=len(pts), eta=float(eta), rows=rows)


class _NodeBudget(Exception):
    """Internal: branch-and-bound node budget exhausted."""


_UNCOVERABLE = 1 << 30


class _CoverSearch:
    """Branch-and-bound minimum set cover over bitmask balls.

    Branching picks the uncovered point with the fewest remaining candidate
    coverers and tries those centers one at a time (highest coverage first);
    each tried center is withdrawn from the candidate pool of later branches
    at the same node, so the branches partition covers by which coverer of
    the branch point they use. Bounds: greedy covers above, the number of
    uncovered points with pairwise-disjoint candidate-coverer sets below.
    Subproblems split into connected components (elements linked through
    shared coverers) that are solved independently under a shared budget and
    memoized with their best known bounds; optima of independent components
    compose, including lexicographic minimality.
    """

    def __init__(self, masks, node_limit):
        self.masks = masks
        self.n = len(masks)
        self.node_limit = node_limit
        self.nodes = 0
        # (elements, centers) -> (True, optimal sel or None) | (False, lower bound)
        self.cache = {}

    def greedy(self, uncovered: int, allowed: int):
        """Max-gain greedy cover; ties go to the lowest index. None if uncoverable."""
        masks = self.masks
        sel = []
        while uncovered:
            best_gain, best_c = 0, -1
            m = allowed
            while m:
                low = m & -m
                m ^= low
                c = low.bit_length() - 1
                gain = (masks[c] & uncovered).bit_count()
                if gain > best_gain:
                    best_gain, best_c = gain, c
            if best_c < 0:
                return None
            sel.append(best_c)
            uncovered &= ~masks[best_c]
            allowed &= ~(1 << best_c)
        return sel

    def _pack(self, elements: int, allowed: int) -> int:
        """Count of uncovered points with pairwise-disjoint candidate-coverer
        sets (every cover spends one center per such point); _UNCOVERABLE if
        some point has no candidate at all."""
        masks = self.masks
        covs = []
        m = elements
        while m:
            low = m & -m
            m ^= low
            cov = masks[low.bit_length() - 1] & allowed
            if cov == 0:
                return _UNCOVERABLE
            covs.append((cov.bit_count(), cov))
        covs.sort(key=lambda t: t[0])
        used, bound = 0, 0
        for _, cov in covs:
            if cov & used == 0:
                used |= cov
                bound += 1
        return bound

    def _decompose(self, elements: int, allowed: int):
        """Connected components of the element/coverer incidence, with the
        centers reachable from each; deterministic ascending order."""
        masks = self.masks
        comps = []
        rest = elements
        while rest:
            comp = rest & -rest
            frontier = comp
            centers = 0
            while frontier:
                comp |= frontier
                grow = 0
                m = frontier
                while m:
                    low = m & -m
                    m ^= low
                    grow |= masks[low.bit_length() - 1]
                grow = grow & allowed & ~centers
                centers |= grow
                reach = 0
                m = grow
                while m:
                    low = m & -m
                    m ^= low
                    reach |= masks[low.bit_length() - 1]
                frontier = reach & rest & ~comp
            rest &= ~comp
            comps.append((comp, centers))
        return comps

    def _bound_of(self, comp: int, centers: int) -> int:
        """Best known lower bound for a component, priming the cache."""
        entry = self.cache.get((comp, centers))
        if entry is None:
            pack = self._pack(comp, centers)
            self.cache[(comp, centers)] = (False, pack)
            return pack
        exact, val = entry
        if exact:
            return _UNCOVERABLE if val is None else len(val)
        return val

    def solve(self, elements: int, allowed: int, cap: int):
        """Optimal cover of `elements` from `allowed` if its size is <= cap,
        else None. A non-None result is exactly optimal."""
        if elements == 0:
            return []
        if cap <= 0:
            return None
        comps = self._decompose(elements, allowed)
        if len(comps) == 1:
            return self._component(*comps[0], cap)
        bounds = [self._bound_of(comp, centers) for comp, centers in comps]
        total = sum(bounds)
        if total > cap:
            return None
        sel = []
        used = 0
        for i, (comp, centers) in enumerate(comps):
            total -= bounds[i]  # lower bound of the components still to solve
            part = self._component(comp, centers, cap - used - total)
            if part is None:
                return None
            sel += part
            used += len(part)
        return sel

    def _component(self, comp: int, centers: int, cap: int):
        if cap <= 0:
            return None
        key = (comp, centers)
        entry = self.cache.get(key)
        if entry is None:
            bound = self._pack(comp, centers)
            self.cache[key] = (False, bound)
        else:
            exact, val = entry
            if exact:
                if val is None or len(val) > cap:
                    return None
                return val
            bound = val
        if bound > cap:
            if bound >= _UNCOVERABLE:
                self.cache[key] = (True, None)
            return None
        res = self._branch(comp, centers, cap, bound)
        if res is not None:
            self.cache[key] = (True, res)
        else:
            self.cache[key] = (False, cap + 1)
        return res

    def _branch(self, elements: int, allowed: int, cap: int, bound: int):
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise _NodeBudget()
        masks = self.masks

        branch_cov, branch_cnt = 0, self.n + 1
        m = elements
        while m:
            low = m & -m
            m ^= low
            cov = masks[low.bit_length() - 1] & allowed
            cnt = cov.bit_count()
            if cnt < branch_cnt:
                branch_cnt, branch_cov = cnt, cov
                if cnt == 1:
                    break

        best = self.greedy(elements, allowed)
        if best is not None and len(best) > cap:
            best = None
        if best is not None and len(best) <= bound:
            return best
        limit = cap if best is None else len(best) - 1

        cands = []
        m = branch_cov
        while m:
            low = m & -m
            m ^= low
            c = low.bit_length() - 1
            cands.append(((masks[c] & elements).bit_count(), -c))
        cands.sort(reverse=True)
        pool = allowed
        for _, negc in cands:
            c = -negc
            pool &= ~(1 << c)
            if limit <= 0:
                break
            sub = self.solve(elements & ~masks[c], pool, limit - 1)
            if sub is not None:
                best = [c] + sub
                limit = len(best) - 1
                if len(best) <= bound:
                    break
        return best

    def minimize(self, elements: int, allowed: int):
        """Sorted optimal cover; on node-budget exhaustion raises _NodeBudget
        with .incumbent holding the greedy fallback."""
        upper = self.greedy(elements, allowed)
        if upper is None:
            return None
        if len(upper) == 1:
            return upper
        try:
            sel = self.solve(elements, allowed, len(upper) - 1)
        except _NodeBudget as exc:
            exc.incumbent = sorted(upper)
            raise
        return sorted(sel) if sel is not None else sorted(upper)

    def lex_smallest(self, elements: int, witness):
        """Lexicographically smallest cover of the same (optimal) size as witness."""
        size = len(witness)
        full_pool = (1 << self.n) - 1
        ref = list(witness)
        prefix = []
        covered = 0
        lo = 0
        while covered & elements != elements:
            target = ref[len(prefix)]
            chosen = None
            for j in range(lo, target):
                ball = self.masks[j]
                if ball & elements & ~covered == 0:
                    continue
                rest = elements & ~covered & ~ball
                remaining = size - len(prefix) - 1
                pool = full_pool & ~((1 << (j + 1)) - 1)
                try:
                    comp = self.solve(rest, pool, remaining)
                except _NodeBudget as exc:
                    exc.incumbent = list(ref)
                    raise
                if comp is not None:
                    chosen = j
                    ref = prefix + [j] + sorted(comp)
                    break
            if chosen is None:
                chosen = target
            prefix.append(chosen)
            covered |= self.masks[chosen]
            lo = chosen + 1
        return prefix


def greedy_cover(adj: AdjacencyMatrix):
    """ln(N)-approximate cover, deterministic (ties to the lowest index), sorted."""
    full = (1 << adj.n) - 1
    sel = _CoverSearch(adj.ball_masks(), node_limit=1).greedy(full, full)
    return sorted(sel)


def exact_min_cover(adj: AdjacencyMatrix, cfg: SolverConfig | None = None):
    """Minimum-cardinality cover; among minimum covers, the lexicographically
    smallest sorted index list. Raises NodeLimitError (with the best incumbent
    found) if the branch-and-bound node budget runs out."""
    cfg = cfg or SolverConfig()
    engine = _CoverSearch(adj.ball_masks(), cfg.exact_node_limit)
    full = (1 << adj.n) - 1
    try:
        witness = engine.minimize(full, full)
        return engine.lex_smallest(full, witness)
    except _NodeBudget as exc:
        raise NodeLimitError(
            f"exact cover search exceeded {cfg.exact_node_limit} nodes",
            incumbent=getattr(exc, "incumbent", None),
        ) from None


def _min_cover_per_class(ds: LabeledDataset, eta: float, norm: NormSpec, cfg: SolverConfig):
    """Per-class minimum covers as global index lists. Raises NodeLimitError with
    a valid fallback cover (greedy where the exact search ran out) attached."""
    mode = cfg.resolve(max(len(ix) for ix in ds.by_class.values()))
    result = {}
    for c in ds.classes:
        idx = ds.by_class[c]
        adj = build_adjacency(ds.points[idx], eta, norm)
        if mode == "exact":
            try:
                local = exact_min_cover(adj, cfg)
            except NodeLimitError as exc:
                fallback = dict(result)
                local_inc = exc.incumbent or greedy_cover(adj)
                fallback[c] = [int(idx[i]) for i in sorted(local_inc)]
                for other in ds.classes:
                    if other not in fallback:
                        oidx = ds.by_class[other]
                        oadj = build_adjacency(ds.points[oidx], eta, norm)
                        fallback[other] = [int(oidx[i]) for i in greedy_cover(oadj)]
                raise NodeLimitError(
                    f"class {c}: {exc}", incumbent=fallback
                ) from None
        else:
            local = greedy_cover(adj)
        result[c] = [int(idx[i]) for i in local]
    return result, mode


def _assemble(ds, per_class_sel, eta, norm, mode, weights=True):
    selected = sorted(i for sel in per_class_sel.values() for i in sel)
    per_class = {
        c: CoverSolution(selected=sorted(sel), eta=float(eta), weights=None, solver=mode)
        for c, sel in per_class_sel.items()
    }
    sol = CoverSolution(
        selected=selected, eta=float(eta), weights=None, solver=mode, per_class=per_class
    )
    if weights:
        sol.weights = compute_weights(ds, sol, norm)
        by_index = dict(zip(sol.selected, sol.weights))
        for sub in per_class.values():
            sub.weights = [by_index[i] for i in sub.selected]
    return sol


def solve_eta_mcs(
    ds: LabeledDataset, eta: float, norm: NormSpec = L2, cfg: SolverConfig | None = None
) -> CoverSolution:
    """Minimum coreset covering every point within eta by a same-class point.

    One set-cover instance per class, so coreset labels are inherited; weights
    are ball membership counts at radius eta.
    """
    if eta < 0:
        raise DataError("eta must be non-negative")
    cfg = cfg or SolverConfig()
    try:
        per_class_sel, mode = _min_cover_per_class(ds, eta, norm, cfg)
    except NodeLimitError as exc:
        sol = _assemble(ds, exc.incumbent, eta, norm, "incumbent")
        raise NodeLimitError(str(exc), incumbent=sol) from None
    return _assemble(ds, per_class_sel, eta, norm, mode)


def feasible_with_k(
    ds: LabeledDataset,
    eta: float,
    k: int,
    norm: NormSpec = L2,
    cfg: SolverConfig | None = None,
    budget_mode: str = "total",
) -> bool:
    """Whether a per-class cover at radius eta fits in budget k.

    Budget k is total selected points ("total") or a per-class cap
    ("per_class"); unused budget can always be padded with extra points, so
    <=-feasibility equals =-feasibility. Under a greedy solver config the test
    is conservative (may report False for borderline-feasible instances).
    """
    if not 1 <= k <= len(ds):
        raise DataError(f"k={k} outside 1..{len(ds)}")
    if k == len(ds):
        return True
    cfg = cfg or SolverConfig()
    per_class_sel, _ = _min_cover_per_class(ds, eta, norm, cfg)
    sizes = [len(sel) for sel in per_class_sel.values()]
    return (sum(sizes) <= k) if budget_mode == "total" else (max(sizes) <= k)


def _max_class_diameter(ds: LabeledDataset, norm: NormSpec) -> float:
    diam = 0.0
    for c in ds.classes:
        pts = ds.class_points(c)
        if len(pts) > 1:
            diam = max(diam, float(pairwise_distances(pts, pts, norm).max()))
    return diam


def solve_k_mcs(
    ds: LabeledDataset,
    k: int,
    norm: NormSpec = L2,
    delta: float = DEFAULT_DELTA,
    cfg: SolverConfig | None = None,
    budget_mode: str = "total",
) -> CoverSolution:
    """Minimum covering radius for a fixed budget k, by bisection on eta.

    Bisects [0, R] with R the largest per-class diameter (feasible with one
    point per class) until the bracket is narrower than delta, then reports
    the exact achieved radius d(T -> S) of the last feasible cover and its
    weights at that radius.
    """
    if delta <= 0:
        raise DataError("delta must be positive")
    n_classes = ds.n_classes
    if budget_mode == "total" and k < n_classes:
        raise InfeasibleError(
            f"budget k={k} below class count {n_classes}: every class needs a point"
        )
    if budget_mode == "per_class" and k < 1:
        raise InfeasibleError("per-class budget must be >= 1")
    if k > len(ds):
        raise DataError(f"k={k} exceeds dataset size {len(ds)}")
    cfg = cfg or SolverConfig()

    def fits(sel_by_class) -> bool:
        sizes = [len(s) for s in sel_by_class.values()]
        return (sum(sizes) <= k) if budget_mode == "total" else (max(sizes) <= k)

    eta_lo, eta_hi = 0.0, _max_class_diameter(ds, norm)
    best_sel, mode = _min_cover_per_class(ds, eta_hi, norm, cfg)
    if not fits(best_sel):
        raise InfeasibleError(f"no cover of size {k} exists even at radius {eta_hi}")
    while eta_hi - eta_lo > delta:
        mid = 0.5 * (eta_lo + eta_hi)
        sel, _ = _min_cover_per_class(ds, mid, norm, cfg)
        if fits(sel):
            eta_hi, best_sel = mid, sel
        else:
            eta_lo = mid

    draft = _assemble(ds, best_sel, eta_hi, norm, mode, weights=False)
    achieved = verify_cover(ds, draft, norm).achieved_radius
    return _assemble(ds, best_sel, achieved, norm, mode)


def _same_class_nearest(ds: LabeledDataset, sol: CoverSolution, norm: NormSpec):
    """Distance from every dataset point to its nearest same-class selected point."""
    sel = np.asarray(sol.selected, dtype=np.int64)
    if len(sel) == 0 or sel.min() < 0 or sel.max() >= len(ds):
        raise DataError("solution indices outside dataset range")
    dist = pairwise_distances(ds.points, ds.points[sel], norm)
    same = ds.labels[:, None] == ds.labels[sel][None, :]
    dist = np.where(same, dist, np.inf)
    return dist, sel


def verify_cover(ds: LabeledDataset, sol: CoverSolution, norm: NormSpec = L2) -> CoverReport:
    """Check that every point lies within sol.eta of a same-class selected point.

    achieved_radius is d(T -> S) restricted to matching labels (inf when some
    class has no representative).
    """
    dist, _ = _same_class_nearest(ds, sol, norm)
    nearest = dist.min(axis=1)
    violations = np.flatnonzero(~(nearest <= sol.eta))
    return CoverReport(
        valid=len(violations) == 0,
        achieved_radius=float(nearest.max()),
        violations=[int(i) for i in violations],
    )


def compute_weights(
    ds: LabeledDataset, sol: CoverSolution, norm: NormSpec = L2, partition: bool = False
):
    """Per-selected-point counts of same-class points inside its eta-ball.

    Default counts with multiplicity (a point in two selected balls counts in
    both, so the weighted loss can only grow); partition=True instead assigns
    each point to its nearest selected center (ties to the lowest index), so
    the counts sum to exactly N.
    """
    dist, sel = _same_class_nearest(ds, sol, norm)
    nearest = dist.min(axis=1)
    if not np.all(nearest <= sol.eta):
        raise CoverInvalidError(
            f"solution is not a valid cover at eta={sol.eta}; cannot compute weights"
        )
    if partition:
        owner = dist.argmin(axis=1)
        counts = np.bincount(owner, minlength=len(sel))
    else:
        counts = (dist <= sol.eta).sum(axis=0)
    return [int(c) for c in counts]


def check_fattening_zip(
    ds: LabeledDataset, sol: CoverSolution, radius: float, norm: NormSpec = L2
) -> bool:
    """Whether closed radius-balls around selected points of different classes
    are pairwise disjoint (call with radius = eps + eta for the fattened coreset)."""
    if radius < 0:
        raise DataError("radius must be non-negative")
    sel = np.asarray(sol.selected, dtype=np.int64)
    labels = ds.labels[sel]
    if len(np.unique(labels)) < 2:
        return True
    dist = pairwise_distances(ds.points[sel], ds.points[sel], norm)
    cross = labels[:, None] != labels[None, :]
    return bool(dist[cross].min() > 2.0 * radius)


def extract_coreset(ds: LabeledDataset, sol: CoverSolution) -> LabeledDataset:
    """The selected points as a dataset, in selected-index order."""
    return ds.subset(sol.selected)
