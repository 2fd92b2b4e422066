"""Distance refiners that count edges between nearest-neighbor balls.

All distances here are normalized: dividing true distances by
(c_sw * k)^(1/dim) makes the pair probability exactly min(1, x^-dim), so
the expected edge count between two kappa-balls at normalized distance x is
about kappa^2 / x^dim and inverting that count refines the estimate.

Three refiners share the counting core: a single pass sized by the initial
estimate, a recursive pass that processes pairs in increasing order so each
ball query can use already-refined values, and an extended pass for
multiple categories that refines only pairs below a trust scale and chains
long estimates through shortest paths over sufficiently long refined edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import CalibrationError, EstimateUnavailableError, InvalidInputError
from .estimates import DistanceEstimate, OverlayEstimate, knn_ball
from .graphs import count_edges_between


@dataclass(frozen=True)
class TwoBallParams:
    """Constants for the recursive refiner.

    c_pd: points per unit ball in normalized units (perfect density).
    c_dim: calibrated ball-pair edge constant (see calibrate_dimconst).
    floor: cutoff below which initial estimates are kept unrefined.
    """

    dim: int
    c_pd: float
    c_dim: float
    floor: float

    def __post_init__(self):
        if min(self.c_pd, self.c_dim, self.floor) <= 0:
            raise InvalidInputError("two-ball constants must be positive")

    @property
    def gamma_exp(self) -> float:
        return (self.dim + 2) / (2.0 * self.dim + 2.0)

    @property
    def rec_exp(self) -> float:
        if self.dim <= 2:
            raise InvalidInputError("the recursive refiner requires dim > 2")
        return 0.5 + 1.0 / self.dim

    def shrink_radius(self, x: float) -> float:
        return x ** self.rec_exp


@dataclass(frozen=True)
class ExtParams:
    r_scale: float
    expansion_bound: float

    def __post_init__(self):
        if self.r_scale <= 0:
            raise InvalidInputError("r_scale must be > 0")
        if self.expansion_bound < 1:
            raise InvalidInputError("expansion_bound must be >= 1")


@dataclass
class NormalizedEstimate:
    """Refined pair values plus bookkeeping counters."""

    normalizer: float
    values: dict[tuple[int, int], float] = field(default_factory=dict)
    fallbacks: int = 0
    taints: int = 0
    disjoint_events: int = 0
    unavailable: int = 0

    @staticmethod
    def _key(u: int, v: int) -> tuple[int, int]:
        return (u, v) if u < v else (v, u)

    def set_value(self, u: int, v: int, value: float):
        self.values[self._key(u, v)] = float(value)

    def value(self, u: int, v: int) -> float:
        return self.values[self._key(u, v)]

    def has(self, u: int, v: int) -> bool:
        return self._key(u, v) in self.values


def kappa_single(x: float, dim: int, n: int) -> int:
    """Ball cardinality for the single-pass test: x^(dim(dim+2)/(2dim+2)),
    rounded and clamped to [1, n]."""
    expo = dim * (dim + 2) / (2.0 * dim + 2.0)
    return int(min(n, max(1, round(x ** expo))))


def _disjoint_balls(est: DistanceEstimate, s: int, t: int, kappa: int):
    """knn balls around s and t; shared nodes leave the larger-id center's
    ball. Returns (ball_s, ball_t, shared_count)."""
    bs = knn_ball(est, s, kappa)
    bt = knn_ball(est, t, kappa)
    shared = np.intersect1d(bs, bt, assume_unique=True)
    if shared.size:
        if s < t:
            bt = np.setdiff1d(bt, shared, assume_unique=True)
        else:
            bs = np.setdiff1d(bs, shared, assume_unique=True)
    return bs, bt, int(shared.size)


def two_ball_estimate(
    union_adj: sp.csr_matrix,
    est: DistanceEstimate,
    s: int,
    t: int,
    dim: int,
    detail: bool = False,
):
    """One counting pass: (kappa^2 / N)^(1/dim) with kappa sized from the
    initial estimate. Raises EstimateUnavailableError when no edges cross
    between the balls (the caller keeps its previous estimate)."""
    if s == t:
        raise InvalidInputError("two-ball estimate needs distinct endpoints")
    n = union_adj.shape[0]
    x = est.value(s, t)
    if not math.isfinite(x):
        raise EstimateUnavailableError(f"no initial estimate for pair ({s}, {t})")
    kappa = kappa_single(x, dim, n)
    bs, bt, shared = _disjoint_balls(est, s, t, kappa)
    count = count_edges_between(union_adj, bs, bt)
    if count == 0:
        raise EstimateUnavailableError(f"no edges between balls of pair ({s}, {t})")
    value = (kappa ** 2 / count) ** (1.0 / dim)
    if detail:
        return value, kappa, count, shared
    return value


@dataclass
class DimconstFit:
    c_dim: float
    residual: float
    cells: list[tuple[float, float, float]]  # (r, x, expected_edges)

    def slope_vs_x(self) -> float:
        """Log-log slope of expected edges against x at the largest fixed r."""
        rs = sorted({c[0] for c in self.cells})
        pts = [(math.log(c[1]), math.log(c[2])) for c in self.cells if c[0] == rs[-1]]
        return _regression_slope(pts)

    def slope_vs_r(self) -> float:
        """Log-log slope of expected edges against r at the largest fixed x."""
        xs = sorted({c[1] for c in self.cells})
        pts = [(math.log(c[0]), math.log(c[2])) for c in self.cells if c[1] == xs[-1]]
        return _regression_slope(pts)


def _regression_slope(pts) -> float:
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if xs.size < 2:
        raise CalibrationError("not enough grid cells for a slope")
    xs = xs - xs.mean()
    return float((xs * (ys - ys.mean())).sum() / (xs * xs).sum())


def _uniform_in_ball(rng, trials: int, dim: int, radius: float, center_x: float = 0.0):
    direction = rng.normal(size=(trials, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radii = radius * rng.random(trials) ** (1.0 / dim)
    pts = direction * radii[:, None]
    pts[:, 0] += center_x
    return pts


def calibrate_dimconst(
    dim: int,
    c_pd: float,
    trials: int,
    rng,
    grid: list[tuple[float, float]] | None = None,
    tol: float = 0.35,
    disjointify: bool = False,
) -> DimconstFit:
    """Monte Carlo fit of the ball-pair edge constant under l2 and perfect
    density.

    For radius-r balls at center distance x, the expected edge count is
    (c_dim * r^2 / x)^dim when r << x; c_dim is fit from a grid of (r, x)
    cells. ``disjointify`` mirrors the runtime overlap rule (points of the
    second ball falling inside the first are dropped) so the constant can
    be fit on the operating geometry where balls overlap.
    """
    if dim < 3:
        raise InvalidInputError("the edge constant is defined for dim >= 3 under l2")
    rng = np.random.default_rng(rng)
    if grid is None:
        # Full cross product so both fixed-r and fixed-x slopes are
        # testable; r/x stays below 0.1 to suppress the (r/x)^2 correction.
        grid = [(r, x) for r in (2.0, 3.0, 4.0) for x in (40.0, 64.0, 100.0)]
    cells = []
    log_c = []
    for r, x in grid:
        a = _uniform_in_ball(rng, trials, dim, r)
        b = _uniform_in_ball(rng, trials, dim, r, center_x=x)
        weight = np.minimum(1.0, np.linalg.norm(a - b, axis=1) ** (-float(dim)))
        if disjointify:
            inside_first = np.linalg.norm(b, axis=1) <= r
            weight[inside_first] = 0.0
        mean_w = float(weight.mean())
        expected = (c_pd * r ** dim) ** 2 * mean_w
        if expected <= 0:
            raise CalibrationError(f"degenerate cell (r={r}, x={x})")
        cells.append((r, x, expected))
        log_c.append(math.log(expected) / dim - 2.0 * math.log(r) + math.log(x))
    c_dim = math.exp(float(np.mean(log_c)))
    residual = float(np.max(np.abs(np.asarray(log_c) - math.log(c_dim))))
    if residual > tol:
        raise CalibrationError(f"fit residual {residual:.3f} exceeds {tol}")
    return DimconstFit(c_dim=c_dim, residual=residual, cells=cells)


def recursive_two_ball(
    union_adj: sp.csr_matrix,
    initial: DistanceEstimate,
    params: TwoBallParams,
    pairs: list[tuple[int, int]] | None = None,
    normalizer: float = 1.0,
) -> NormalizedEstimate:
    """Refine pairs in increasing initial-estimate order.

    Balls are drawn from the partially updated estimate, so smaller scales
    anchor larger ones. Pairs at or below the floor keep their initial
    values; a zero cross count keeps the previous estimate and is counted
    as a fallback. Ball queries that touch fallback values count as taints.
    """
    n = union_adj.shape[0]
    if pairs is None:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    result = NormalizedEstimate(normalizer=normalizer)
    overlay = OverlayEstimate(initial)
    items = []
    for (u, v) in pairs:
        if u == v:
            raise InvalidInputError("pair with identical endpoints")
        x = initial.value(u, v)
        items.append((x, min(u, v), max(u, v)))
    items.sort()
    xs = [it[0] for it in items]
    assert xs == sorted(xs), "processing order must be sorted by initial estimate"
    fallback_partners: dict[int, set[int]] = {}
    for x, s, t in items:
        if x <= params.floor or not math.isfinite(x):
            result.set_value(s, t, x)
            continue
        shrink = params.shrink_radius(x)
        kappa = int(min(n, max(1, round(params.c_pd * shrink ** params.dim))))
        bs, bt, shared = _disjoint_balls(overlay, s, t, kappa)
        if shared:
            result.disjoint_events += 1
        ps = fallback_partners.get(s)
        pt = fallback_partners.get(t)
        tainted = bool(ps and np.any(np.isin(bs, list(ps))))
        if not tainted and pt:
            tainted = bool(np.any(np.isin(bt, list(pt))))
        if tainted:
            result.taints += 1
        count = count_edges_between(union_adj, bs, bt)
        if count == 0:
            result.fallbacks += 1
            fallback_partners.setdefault(s, set()).add(t)
            fallback_partners.setdefault(t, set()).add(s)
            result.set_value(s, t, x)
            continue
        value = params.c_dim * shrink ** 2 * count ** (-1.0 / params.dim)
        overlay.set_value(s, t, value)
        result.set_value(s, t, value)
    return result


def hat_scale(n: int, dim: int) -> float:
    """Internal cap on the trust scale: (n / ln n)^((2d+2)/(2d^2+3d))."""
    return (n / math.log(n)) ** ((2.0 * dim + 2.0) / (2.0 * dim ** 2 + 3.0 * dim))


def _enumerate_h_edges(initial: DistanceEstimate, r_cap: float) -> list[tuple[int, int]]:
    out = []
    n = initial.n
    for u in range(n):
        row = initial.row(u)
        vs = np.flatnonzero(row <= r_cap)
        for v in vs:
            if v > u:
                out.append((u, int(v)))
    return out


def extended_two_ball(
    union_adj: sp.csr_matrix,
    initial: DistanceEstimate,
    ext: ExtParams,
    dim: int,
    pairs: list[tuple[int, int]],
    normalizer: float = 1.0,
    strict: bool = False,
) -> NormalizedEstimate:
    """Two-ball refinement below the trust scale, shortest paths above.

    Every pair with initial estimate at most r_scale (capped internally by
    hat_scale) is refined directly against the initial estimate. A query
    outside that set is estimated by the shortest s-t path over refined
    edges that are either sufficiently long (initial estimate at least
    r_scale / (2 * expansion)) or end at t. Pairs with no admissible path
    get inf (or raise when ``strict``).
    """
    n = union_adj.shape[0]
    r_cap = min(ext.r_scale, hat_scale(n, dim))
    result = NormalizedEstimate(normalizer=normalizer)
    h_edges = _enumerate_h_edges(initial, r_cap)
    refined: dict[tuple[int, int], float] = {}
    for (u, v) in h_edges:
        try:
            refined[(u, v)] = two_ball_estimate(union_adj, initial, u, v, dim)
        except EstimateUnavailableError:
            refined[(u, v)] = initial.value(u, v)
            result.fallbacks += 1

    long_threshold = r_cap / (2.0 * ext.expansion_bound)
    long_edges = [
        (u, v, length)
        for (u, v), length in refined.items()
        if initial.value(u, v) >= long_threshold
    ]
    by_target: dict[int, list[tuple[int, int]]] = {}
    for (s, t) in pairs:
        key = (min(s, t), max(s, t))
        if key in refined:
            result.set_value(s, t, refined[key])
        else:
            by_target.setdefault(t, []).append((s, t))

    for t, queries in by_target.items():
        dist = _ht_shortest_paths(n, long_edges, refined, t)
        for (s, _) in queries:
            val = dist[s]
            if not math.isfinite(val):
                if strict:
                    raise EstimateUnavailableError(
                        f"no admissible path for pair ({s}, {t})"
                    )
                result.unavailable += 1
            result.set_value(s, t, float(val))
    return result


def _ht_shortest_paths(
    n: int, long_edges: list[tuple[int, int, float]], refined: dict, t: int
) -> np.ndarray:
    """Distances from every node to t over long edges plus final hops into t."""
    arcs: dict[tuple[int, int], float] = {}

    def add(u, v, w):
        key = (u, v)
        if key not in arcs or w < arcs[key]:
            arcs[key] = w

    for (u, v, length) in long_edges:
        add(u, v, length)
        add(v, u, length)
    for (u, v), length in refined.items():
        # Any H edge is usable as the final hop into t.
        if v == t:
            add(u, t, length)
        elif u == t:
            add(v, t, length)
    if not arcs:
        return np.full(n, np.inf)
    rows = np.array([k[0] for k in arcs])
    cols = np.array([k[1] for k in arcs])
    data = np.array(list(arcs.values()))
    graph = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    # Search backwards from t over reversed arcs.
    dist = csgraph.dijkstra(graph.T, directed=True, indices=t)
    return dist


def multi_recursive_two_ball(
    union_adj: sp.csr_matrix,
    initial: DistanceEstimate,
    params: TwoBallParams,
    num_categories: int,
    pairs: list[tuple[int, int]] | None = None,
    normalizer: float = 1.0,
    expansion_bound: float = 2.0,
) -> NormalizedEstimate:
    """Recursive refinement with cross-category contamination in the counts.

    With one category this is exactly the recursive refiner. With more, the
    per-ball guarantees stop at normalized scale n^(1/(dim+1)): pairs whose
    initial estimate exceeds that are routed through the long-edge
    shortest-path composition with r_scale set to the cutoff.
    """
    n = union_adj.shape[0]
    if num_categories <= 1:
        return recursive_two_ball(union_adj, initial, params, pairs, normalizer)
    cutoff = n ** (1.0 / (params.dim + 1))
    if pairs is None:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    small = [(u, v) for (u, v) in pairs if initial.value(u, v) <= cutoff]
    large = [(u, v) for (u, v) in pairs if initial.value(u, v) > cutoff]
    result = recursive_two_ball(union_adj, initial, params, small, normalizer)
    if large:
        ext = ExtParams(r_scale=cutoff, expansion_bound=expansion_bound)
        routed = extended_two_ball(
            union_adj, initial, ext, params.dim, large, normalizer
        )
        result.values.update(routed.values)
        result.fallbacks += routed.fallbacks
        result.unavailable += routed.unavailable
    return result
