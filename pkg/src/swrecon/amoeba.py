"""Category separation by seeded region growing.

Each iteration finds a seed clique in the pruned pair set that is spread
out in every previously recovered category, then grows an edge set one
edge at a time: a candidate pair (u, v) is admitted once the observed graph
holds at least ``amoeba_m`` edges between u and v's current neighborhood in
the growing set. The admission test is monotone in the growing set, so the
fixed point does not depend on processing order; a queue with re-enqueue on
insertion reaches it in near-linear time.

The grown edge set for category i is a spanner of that category's metric:
hop counts times ``amoeba_r`` estimate distances with constant expansion
and no contraction. Beacon labels compress those spanner distances into
per-node lists queryable without BFS.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EstimateUnavailableError,
    InvalidInputError,
    SeedNotFoundError,
    SwreconError,
)
from .graphs import (
    UNREACHED,
    BitAdjacency,
    bfs_hops,
    bits_to_nodes,
    canonical_edges,
    edges_to_csr,
    nodes_to_bits,
    popcount,
)


@dataclass(frozen=True)
class AmoebaParams:
    amoeba_n: int
    amoeba_m: int
    amoeba_r: float
    diam_floor: float
    seed_mode: str = "fast"

    def __post_init__(self):
        if not (self.amoeba_n >= self.amoeba_m >= 1):
            raise InvalidInputError(
                f"need amoeba_n >= amoeba_m >= 1, got {self.amoeba_n}, {self.amoeba_m}"
            )
        if self.amoeba_r <= 0:
            raise InvalidInputError("amoeba_r must be > 0")
        if self.seed_mode not in ("fast", "brute"):
            raise InvalidInputError(f"unknown seed mode {self.seed_mode!r}")


def default_amoeba_params(
    local_r: float,
    pruned_r: float,
    dim: int,
    num_categories: int,
    n: int,
    theta_am: float = 1.0,
    theta_ar: float = 2.0,
    seed_mode: str = "fast",
    diam_floor: float | None = None,
) -> AmoebaParams:
    """Parameter defaults derived from the pruning radii.

    amoeba_n ~ (localR/2)^dim is the ball-clique size the seed search can
    expect; amoeba_m scales it down by 8^dim * K^2; amoeba_r exceeds
    pruned_r by theta_ar * K^(3/dim). The diameter floor defaults to
    min(ceil(ln^2 n), n); at small n that exceeds any achievable hop
    diameter, so experiment configs override it downward.
    """
    amoeba_n = max(2, round((local_r / 2.0) ** dim))
    amoeba_m = max(2, round(amoeba_n / (8 ** dim * num_categories ** 2 * theta_am)))
    amoeba_m = min(amoeba_m, amoeba_n)
    amoeba_r = theta_ar * num_categories ** (3.0 / dim) * pruned_r
    if diam_floor is None:
        diam_floor = min(math.ceil(math.log(n) ** 2), n)
    return AmoebaParams(
        amoeba_n=amoeba_n,
        amoeba_m=amoeba_m,
        amoeba_r=amoeba_r,
        diam_floor=diam_floor,
        seed_mode=seed_mode,
    )


@dataclass
class AmoebaResult:
    category_edges: list[np.ndarray]
    seed_cliques: list[np.ndarray]
    category_order: list[int]
    uncovered: np.ndarray

    @property
    def all_covered(self) -> bool:
        return self.uncovered.shape[0] == 0


def amoeba_test(
    union_bits: BitAdjacency,
    amoeba_bits: BitAdjacency,
    u: int,
    v: int,
    amoeba_m: int,
) -> bool:
    """True when the observed graph has >= amoeba_m edges between u and
    v's neighborhood in the growing edge set."""
    if amoeba_m <= 0:
        return True
    count = popcount(union_bits.rows[u] & amoeba_bits.rows[v])
    return count >= amoeba_m


def _diameter_reaches(adj, nodes: np.ndarray, floor: float) -> bool:
    """True when the hop diameter of ``nodes`` in ``adj`` is >= floor
    (disconnected counts as infinite). Stops at the first witness pair;
    candidates whose double eccentricity stays below the floor are
    rejected after a single scan."""
    if floor <= 0:
        return True
    nodes = np.asarray(nodes, dtype=np.int64)
    for i, u in enumerate(nodes):
        d = bfs_hops(adj, int(u))[nodes]
        if np.any(d == UNREACHED):
            return True
        ecc = int(d.max())
        if ecc >= floor:
            return True
        if i == 0 and 2 * ecc < floor:
            # diam <= 2 * ecc(u0) by the triangle inequality.
            return False
    return False


def _prior_floors_ok(prior_adjs, nodes: np.ndarray, floor: float) -> bool:
    return all(_diameter_reaches(adj, nodes, floor) for adj in prior_adjs)


def _is_clique(bits: BitAdjacency, members: np.ndarray, member_bits: np.ndarray) -> bool:
    want = members.size - 1
    for c in members:
        if popcount(bits.rows[c] & member_bits) < want:
            return False
    return True


def find_seed_clique_brute(
    pruned_bits: BitAdjacency,
    prior_adjs: list,
    amoeba_n: int,
    diam_floor: float,
) -> np.ndarray:
    """Greedy clique extraction inside each node's pruned neighborhood,
    first node whose clique meets the size and prior-diameter floors wins."""
    n = pruned_bits.n
    for u in range(n):
        nbrs = pruned_bits.row_nodes(u)
        if nbrs.size + 1 < amoeba_n:
            continue
        clique = [u]
        clique_bits = nodes_to_bits(np.array([u]), n)
        for w in nbrs:
            w = int(w)
            if w == u:
                continue
            if popcount(pruned_bits.rows[w] & clique_bits) == len(clique):
                clique.append(w)
                clique_bits |= nodes_to_bits(np.array([w]), n)
        if len(clique) < amoeba_n:
            continue
        members = np.asarray(sorted(clique), dtype=np.int64)
        if _prior_floors_ok(prior_adjs, members, diam_floor):
            return members
    raise SeedNotFoundError(
        f"no clique of size >= {amoeba_n} with prior diameter >= {diam_floor}"
    )


def find_seed_clique_fast(
    strict_bits: BitAdjacency,
    loose_bits: BitAdjacency,
    num_categories: int,
    amoeba_n: int,
    diam_floor: float,
    prior_adjs: list,
    max_subsets_per_node: int = 2000,
) -> np.ndarray:
    """Seed via neighborhood intersections in the strict pruned graph.

    Iterates K-subsets S of N(u) (u included in its own neighborhood) and
    returns the first intersection of the members' neighborhoods that forms
    a big enough clique in the loose pruned graph and clears the prior
    diameter floors.
    """
    n = strict_bits.n
    diag = np.arange(n)
    for u in range(n):
        row_u = strict_bits.rows[u].copy()
        row_u[u // 64] |= np.uint64(1) << np.uint64(u % 64)
        nbrs = bits_to_nodes(row_u)
        if nbrs.size < num_categories:
            continue
        # u leads its own neighborhood so subsets containing u come first.
        candidates = [u] + [int(w) for w in nbrs if w != u]
        tried = 0
        for subset in itertools.combinations(candidates, num_categories):
            tried += 1
            if tried > max_subsets_per_node:
                break
            inter = None
            for w in subset:
                row = strict_bits.rows[w].copy()
                row[w // 64] |= np.uint64(1) << np.uint64(w % 64)
                inter = row if inter is None else (inter & row)
            members = bits_to_nodes(inter)
            if members.size < amoeba_n:
                continue
            if not _is_clique(loose_bits, members, inter):
                continue
            if _prior_floors_ok(prior_adjs, members, diam_floor):
                return members.astype(np.int64)
    raise SeedNotFoundError(
        f"exhausted {num_categories}-subsets without a qualifying intersection"
    )


def _clique_pairs(members: np.ndarray) -> np.ndarray:
    us, vs = np.triu_indices(members.size, k=1)
    return np.stack([members[us], members[vs]], axis=1)


def grow_amoeba(
    n: int,
    union_bits: BitAdjacency,
    growth_pairs: np.ndarray,
    seed_clique: np.ndarray,
    amoeba_m: int,
    order_rng=None,
) -> np.ndarray:
    """Grow from the seed clique to the admission-test fixed point.

    The queue starts with every candidate pair; each insertion re-enqueues
    the pairs incident to its endpoints. Because the test is monotone in
    the growing set, the fixed point is order independent; ``order_rng``
    shuffles the initial queue purely so tests can verify that.
    """
    growth_pairs = canonical_edges(growth_pairs)
    m = growth_pairs.shape[0]
    amoeba_bits = BitAdjacency(n)
    seed_clique = np.asarray(seed_clique, dtype=np.int64)
    for u, v in _clique_pairs(seed_clique):
        amoeba_bits.add_edge(int(u), int(v))

    # Incidence lists over the candidate pairs, for re-enqueueing.
    incident = [[] for _ in range(n)]
    for eid, (u, v) in enumerate(growth_pairs):
        incident[u].append(eid)
        incident[v].append(eid)

    in_amoeba = np.zeros(m, dtype=bool)
    for eid, (u, v) in enumerate(growth_pairs):
        if amoeba_bits.has_edge(int(u), int(v)):
            in_amoeba[eid] = True

    order = np.arange(m)
    if order_rng is not None:
        np.random.default_rng(order_rng).shuffle(order)
    queue = deque(order.tolist())
    queued = np.ones(m, dtype=bool)

    while queue:
        eid = queue.popleft()
        queued[eid] = False
        if in_amoeba[eid]:
            continue
        u, v = int(growth_pairs[eid, 0]), int(growth_pairs[eid, 1])
        if not (
            amoeba_test(union_bits, amoeba_bits, u, v, amoeba_m)
            or amoeba_test(union_bits, amoeba_bits, v, u, amoeba_m)
        ):
            continue
        in_amoeba[eid] = True
        amoeba_bits.add_edge(u, v)
        for w in (u, v):
            for other in incident[w]:
                if not in_amoeba[other] and not queued[other]:
                    queued[other] = True
                    queue.append(other)

    grown = growth_pairs[in_amoeba]
    return canonical_edges(np.concatenate([grown, _clique_pairs(seed_clique)]))


def run_amoeba_stage(
    n: int,
    union_edges: np.ndarray,
    pruned_strict: np.ndarray,
    num_categories: int,
    params: AmoebaParams,
    pruned_loose: np.ndarray | None = None,
) -> AmoebaResult:
    """K iterations of seed-and-grow; seeding failures carry the iteration
    index. In fast mode growth runs over the loose pruned pair set."""
    union_bits = BitAdjacency(n, canonical_edges(union_edges))
    strict = canonical_edges(pruned_strict)
    strict_bits = BitAdjacency(n, strict)
    loose = canonical_edges(pruned_loose) if pruned_loose is not None else None
    loose_bits = BitAdjacency(n, loose) if loose is not None else None

    use_fast = params.seed_mode == "fast" and loose is not None
    growth_pairs = loose if use_fast else strict

    category_edges: list[np.ndarray] = []
    seed_cliques: list[np.ndarray] = []
    prior_adjs: list = []
    for i in range(num_categories):
        try:
            if use_fast:
                try:
                    seed = find_seed_clique_fast(
                        strict_bits,
                        loose_bits,
                        num_categories,
                        params.amoeba_n,
                        params.diam_floor,
                        prior_adjs,
                    )
                except SeedNotFoundError:
                    seed = find_seed_clique_brute(
                        strict_bits, prior_adjs, params.amoeba_n, params.diam_floor
                    )
            else:
                seed = find_seed_clique_brute(
                    strict_bits, prior_adjs, params.amoeba_n, params.diam_floor
                )
        except SeedNotFoundError as exc:
            raise SeedNotFoundError(str(exc), iteration=i) from None
        grown = grow_amoeba(
            n, union_bits, growth_pairs, seed, params.amoeba_m
        )
        category_edges.append(grown)
        seed_cliques.append(seed)
        prior_adjs.append(edges_to_csr(n, grown))

    covered = np.zeros(strict.shape[0], dtype=bool)
    if strict.shape[0]:
        strict_keys = strict[:, 0] * n + strict[:, 1]
        for grown in category_edges:
            if grown.shape[0] == 0:
                continue
            keys = grown[:, 0] * n + grown[:, 1]
            covered |= np.isin(strict_keys, keys)
    return AmoebaResult(
        category_edges=category_edges,
        seed_cliques=seed_cliques,
        category_order=list(range(num_categories)),
        uncovered=strict[~covered],
    )


def spanner_distance(edges: np.ndarray, n: int, u: int, v: int, scale: float) -> float:
    """BFS hop count times ``scale``; infinite when disconnected."""
    if u == v:
        return 0.0
    adj = edges_to_csr(n, canonical_edges(edges))
    d = bfs_hops(adj, u)[v]
    return float("inf") if d == UNREACHED else float(d) * scale


@dataclass
class DistanceLabels:
    """Per-node beacon records: node -> {beacon: best hop distance}."""

    scales: list[float]
    tables: list[dict[int, int]]
    records: list[tuple[int, int, float, int]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.tables)

    def average_size(self) -> float:
        return sum(len(t) for t in self.tables) / max(1, len(self.tables))


def build_distance_labels(
    edges: np.ndarray,
    n: int,
    rng,
    scale_base: float = 2.0,
    log_target: float = 2.0,
    hop_mult: float = 2.0,
    size_cap: float | None = None,
) -> DistanceLabels:
    """Beacon labels over a spanner graph.

    For each geometric hop scale r, beacons are sampled uniformly so a
    radius-r ball holds about ``log_target * ln n`` of them in expectation;
    each beacon BFSes out to hop_mult * r and every reached node records
    the hop distance. Average label size is asserted against ``size_cap``
    (default 64 * ln^2 n).
    """
    if scale_base <= 1:
        raise InvalidInputError("scale_base must exceed 1")
    rng = np.random.default_rng(rng)
    adj = edges_to_csr(n, canonical_edges(edges))
    if size_cap is None:
        size_cap = 64.0 * math.log(max(n, 3)) ** 2

    # Typical ball sizes by hop radius, sampled at a few sources.
    probes = rng.choice(n, size=min(5, n), replace=False)
    probe_hops = [bfs_hops(adj, int(s)) for s in probes]

    tables: list[dict[int, int]] = [dict() for _ in range(n)]
    records: list[tuple[int, int, float, int]] = []
    scales: list[float] = []
    r = 1.0
    while True:
        scales.append(r)
        sizes = [int(np.count_nonzero(h <= r)) for h in probe_hops]
        ball = max(1, int(np.median(sizes)))
        k_r = min(n, max(1, math.ceil(log_target * math.log(max(n, 3)) * n / ball)))
        beacons = rng.choice(n, size=k_r, replace=False)
        limit = max(1, int(math.ceil(hop_mult * r)))
        for b in beacons:
            hops = bfs_hops(adj, int(b), max_hops=limit)
            reached = np.flatnonzero(hops != UNREACHED)
            for v in reached:
                h = int(hops[v])
                t = tables[v]
                if b not in t or h < t[b]:
                    t[b] = h
                records.append((int(v), int(b), r, h))
        if ball >= n or r > n:
            break
        r *= scale_base

    labels = DistanceLabels(scales=scales, tables=tables, records=records)
    if labels.average_size() > size_cap:
        raise SwreconError(
            f"label size {labels.average_size():.1f} exceeds cap {size_cap:.1f}"
        )
    return labels


def label_query(labels: DistanceLabels, u: int, v: int, scale: float) -> float:
    """min over common beacons of hops(b, u) + hops(b, v), times ``scale``."""
    tu, tv = labels.tables[u], labels.tables[v]
    if len(tv) < len(tu):
        tu, tv = tv, tu
    best = None
    for b, hu in tu.items():
        hv = tv.get(b)
        if hv is None:
            continue
        total = hu + hv
        if best is None or total < best:
            best = total
    if best is None:
        raise EstimateUnavailableError(f"no common beacon for nodes {u} and {v}")
    return best * scale
