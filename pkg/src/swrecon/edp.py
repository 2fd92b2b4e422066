"""Constant-degree pruning via bounded-length edge-disjoint paths.

With constant average degree, common-neighbor counts carry no signal, so an
edge survives only if the graph holds p edge-disjoint paths of at most h
hops between its endpoints. Iterating removal to the fixed point yields the
unique maximal (p, h)-connected subset, which retains any (p, h)-connected
local witness structure and, with high probability, none of the long random
edges. The decision procedure is an exact backtracking search; pruning
correctness demands exactness, so a state cap raises instead of
approximating.
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    AdaptiveSearchError,
    InvalidInputError,
    ResourceExceededError,
)
from .graphs import canonical_edges, degrees, is_connected
from .torus import PointSet, pair_distances

DEFAULT_STATE_CAP = 1_000_000


@dataclass(frozen=True)
class EdpParams:
    p: int
    h: int
    alpha: float = 1.0

    def __post_init__(self):
        if self.p < 1 or self.h < 1:
            raise InvalidInputError("path count and hop bound must be >= 1")
        if self.alpha <= 0:
            raise InvalidInputError("alpha must be > 0")


@dataclass
class RichnessReport:
    is_connected_after_prune: bool
    isolated_count: int
    spanner_contraction: float
    spanner_expansion: float


class _MutableGraph:
    """Adjacency dicts plus liveness flags; supports permanent edge removal."""

    def __init__(self, n: int, edges: np.ndarray):
        self.n = n
        self.edges = edges
        self.alive = np.ones(edges.shape[0], dtype=bool)
        self.nbrs: list[dict[int, int]] = [dict() for _ in range(n)]
        for eid, (u, v) in enumerate(edges):
            self.nbrs[u][int(v)] = eid
            self.nbrs[v][int(u)] = eid

    def remove(self, eid: int):
        u, v = map(int, self.edges[eid])
        self.alive[eid] = False
        self.nbrs[u].pop(v, None)
        self.nbrs[v].pop(u, None)

    def hop_limited_dist(self, target: int, limit: int) -> dict[int, int]:
        dist = {target: 0}
        frontier = [target]
        for d in range(1, limit + 1):
            nxt = []
            for w in frontier:
                for nbr in self.nbrs[w]:
                    if nbr not in dist:
                        dist[nbr] = d
                        nxt.append(nbr)
            frontier = nxt
            if not frontier:
                break
        return dist


def _disjoint_paths_search(
    graph: _MutableGraph, u: int, v: int, p: int, h: int, cap: int
):
    """Exact search for p edge-disjoint u-v paths of <= h hops.

    Depth-first extension of the current path with backtracking across
    complete path choices; hop-distance-to-target pruning keeps the search
    inside the feasible neighborhood. Returns the frozenset of certificate
    edge ids, or None.
    """
    if len(graph.nbrs[u]) < p or len(graph.nbrs[v]) < p:
        return None
    dist_v = graph.hop_limited_dist(v, h)
    if u not in dist_v:
        return None
    used: set[int] = set()
    counter = [0]

    def extend(w: int, depth: int, visited: set[int], remaining: int) -> bool:
        counter[0] += 1
        if counter[0] > cap:
            raise ResourceExceededError(
                f"disjoint-path search for ({u}, {v}) exceeded {cap} states"
            )
        if w == v:
            return need(remaining - 1)
        if depth == h:
            return False
        for nbr, eid in graph.nbrs[w].items():
            if eid in used or nbr in visited:
                continue
            d = dist_v.get(nbr)
            if d is None or depth + 1 + d > h:
                continue
            used.add(eid)
            visited.add(nbr)
            if extend(nbr, depth + 1, visited, remaining):
                return True
            used.discard(eid)
            visited.discard(nbr)
        return False

    def need(remaining: int) -> bool:
        if remaining == 0:
            return True
        return extend(u, 0, {u}, remaining)

    if need(p):
        return frozenset(used)
    return None


def has_p_disjoint_bounded_paths(
    n: int,
    edges: np.ndarray,
    u: int,
    v: int,
    p: int,
    h: int,
    state_cap: int = DEFAULT_STATE_CAP,
) -> bool:
    """Exact decision: do p edge-disjoint u-v paths of <= h hops exist."""
    if u == v:
        raise InvalidInputError("endpoints must differ")
    graph = _MutableGraph(n, canonical_edges(edges))
    return _disjoint_paths_search(graph, u, v, p, h, state_cap) is not None


def edp_prune(
    n: int,
    edges: np.ndarray,
    p: int,
    h: int,
    state_cap: int = DEFAULT_STATE_CAP,
    order_rng=None,
) -> np.ndarray:
    """Remove edges lacking p disjoint <= h-hop connections, to fixed point.

    Each surviving edge keeps a certificate (the edge ids of its witnessing
    paths); when a certificate edge dies its dependents re-enter the queue.
    The result is the unique maximal (p, h)-connected subset, independent
    of processing order; ``order_rng`` shuffles the queue for tests.
    """
    edges = canonical_edges(edges)
    m = edges.shape[0]
    graph = _MutableGraph(n, edges)
    dependents: list[set[int]] = [set() for _ in range(m)]
    order = np.arange(m)
    if order_rng is not None:
        np.random.default_rng(order_rng).shuffle(order)
    queue = deque(order.tolist())
    queued = np.ones(m, dtype=bool)
    while queue:
        eid = queue.popleft()
        queued[eid] = False
        if not graph.alive[eid]:
            continue
        u, v = map(int, edges[eid])
        cert = _disjoint_paths_search(graph, u, v, p, h, state_cap)
        if cert is not None:
            for ce in cert:
                dependents[ce].add(eid)
            continue
        graph.remove(eid)
        for dep in dependents[eid]:
            if graph.alive[dep] and not queued[dep]:
                queued[dep] = True
                queue.append(dep)
        dependents[eid] = set()
    return edges[graph.alive]


def const_dr(
    alpha: float, p: int, h: int, n: int, dim: int, k: float, c0: float = 4.0
) -> float:
    """Length threshold above which (p, h)-pruning removes edges w.h.p.

    D^((2+alpha)/p) * h * (c0 * (k + ln^(1+alpha) n))^(2h/dim), with D the
    l2 torus diameter for n unit-density points. Natural logs throughout;
    c0 stands in for the hidden absolute constant.
    """
    if min(alpha, p, h, n, dim, k, c0) <= 0:
        raise InvalidInputError("all const_dr arguments must be positive")
    side = n ** (1.0 / dim)
    diameter = math.sqrt(dim) * side / 2.0
    return (
        diameter ** ((2.0 + alpha) / p)
        * h
        * (c0 * (k + math.log(n) ** (1.0 + alpha))) ** (2.0 * h / dim)
    )


def check_richness(
    local_edges: np.ndarray,
    n: int,
    p: int,
    h: int,
    points: PointSet,
    pair_sample: int = 2000,
    rng=None,
    state_cap: int = DEFAULT_STATE_CAP,
) -> RichnessReport:
    """Prune the local structure at (p, h) and measure what is left.

    Reports isolated-node count, connectivity, and the hop-vs-metric
    distortion of the pruned structure over sampled pairs (exhaustive when
    small). Infinite expansion marks a disconnected or empty remainder.
    """
    from .graphs import bfs_hops, edges_to_csr, UNREACHED

    pruned = edp_prune(n, local_edges, p, h, state_cap)
    deg = degrees(n, pruned)
    isolated = int(np.count_nonzero(deg == 0))
    connected = is_connected(n, pruned)
    if pruned.shape[0] == 0:
        return RichnessReport(False, isolated, math.inf, math.inf)
    adj = edges_to_csr(n, pruned)
    rng = np.random.default_rng(rng)
    if n * (n - 1) // 2 <= pair_sample:
        us, vs = np.triu_indices(n, k=1)
    else:
        us = rng.integers(0, n, size=pair_sample)
        vs = rng.integers(0, n, size=pair_sample)
        keep = us != vs
        us, vs = us[keep], vs[keep]
    true_d = pair_distances(points.space, points.coords, us, vs)
    ratios = []
    expansion = 0.0
    contraction = math.inf
    sources = {}
    for u, v, td in zip(us, vs, true_d):
        if td <= 0:
            continue
        hops = sources.get(u)
        if hops is None:
            hops = bfs_hops(adj, int(u))
            sources[u] = hops
        hv = hops[v]
        if hv == UNREACHED:
            expansion = math.inf
            continue
        ratio = float(hv) / td
        contraction = min(contraction, ratio)
        expansion = max(expansion, ratio)
        ratios.append(ratio)
    if not ratios:
        contraction, expansion = math.inf, math.inf
    return RichnessReport(connected, isolated, contraction, expansion)


def adaptive_edp(
    n: int,
    edges: np.ndarray,
    h_candidates: list[int],
    alpha: float,
    dim: int,
    k: float,
    c0: float = 4.0,
    state_cap: int = DEFAULT_STATE_CAP,
    binary_search: bool = False,
    side_condition: dict | None = None,
) -> tuple[int, int, np.ndarray]:
    """Pick the (p, h) pair with smallest threshold whose pruning keeps the
    graph connected.

    p ranges from 1 up to the smallest positive node degree; candidate
    pairs are evaluated in increasing const_dr order. ``binary_search``
    bisects over the same order under the assumption that connectivity is
    monotone along it (identical output whenever that holds).
    ``side_condition`` with keys expansion, kappa_dens, c_sw triggers a
    warning when (2*C*h)^dim * kappa^2 * c_sw * k exceeds 1/6.
    """
    if not h_candidates:
        raise InvalidInputError("need at least one candidate hop bound")
    edges = canonical_edges(edges)
    deg = degrees(n, edges)
    positive = deg[deg > 0]
    if positive.size == 0:
        raise AdaptiveSearchError("input graph has no edges")
    p_max = int(positive.min())
    candidates = [
        (const_dr(alpha, p, h, n, dim, k, c0), p, h)
        for h in h_candidates
        for p in range(1, p_max + 1)
    ]
    candidates.sort()

    if side_condition is not None:
        expansion = side_condition["expansion"]
        kappa = side_condition["kappa_dens"]
        c_sw = side_condition["c_sw"]
        for _, p, h in candidates:
            if (2 * expansion * h) ** dim * kappa ** 2 * c_sw * k > 1.0 / 6.0:
                warnings.warn(
                    f"isolation side condition violated at (p={p}, h={h}): "
                    "the disconnection guarantee for over-pruned pairs may not hold",
                    RuntimeWarning,
                )
                break

    def evaluate(idx: int):
        _, p, h = candidates[idx]
        pruned = edp_prune(n, edges, p, h, state_cap)
        return is_connected(n, pruned), pruned

    if binary_search:
        lo, hi = 0, len(candidates) - 1
        ok_hi, pruned_hi = evaluate(hi)
        if not ok_hi:
            raise AdaptiveSearchError("no candidate pair keeps the graph connected")
        best_idx, best_pruned = hi, pruned_hi
        while lo < hi:
            mid = (lo + hi) // 2
            ok, pruned = evaluate(mid)
            if ok:
                best_idx, best_pruned = mid, pruned
                hi = mid
            else:
                lo = mid + 1
        _, p, h = candidates[best_idx]
        return p, h, best_pruned

    for idx in range(len(candidates)):
        ok, pruned = evaluate(idx)
        if ok:
            _, p, h = candidates[idx]
            return p, h, pruned
    raise AdaptiveSearchError("no candidate pair keeps the graph connected")
