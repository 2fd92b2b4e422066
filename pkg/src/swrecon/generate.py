"""Small-world graph sampling and the multiplex union.

A single category over points V places each unordered pair (u, v) in the
edge set independently with probability f(r) = min(1, C * k * r^-dim),
r = d(u, v). The normalizer C is calibrated numerically so the expected
average degree equals 1 at k = 1, making the expected-degree contract exact
instead of leaning on an asymptotic constant. The observed network is the
union of the per-category edge sets; ground-truth origin labels live only on
the generation side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError, InvalidInputError
from .graphs import canonical_edges, pack_pairs, unpack_pairs
from .torus import CategoryEnsemble, PointSet, pair_distances

_CHUNK_ROWS = 256


@dataclass(frozen=True)
class SwgParams:
    """Target degree k and normalizer for one category."""

    k: float
    c_sw: float
    dim: int

    def __post_init__(self):
        if self.k < 0:
            raise InvalidInputError("target degree k must be >= 0")
        if self.c_sw <= 0:
            raise InvalidInputError("normalizer must be > 0")


def edge_probability(r, c_sw: float, k: float, dim: int):
    """min(1, c_sw * k * r^-dim), elementwise."""
    r = np.asarray(r, dtype=np.float64)
    with np.errstate(divide="ignore"):
        p = c_sw * k * r ** (-float(dim))
    return np.minimum(1.0, p)


def local_radius(c_sw: float, k: float, dim: int) -> float:
    """Distance below which pair probability clamps to 1."""
    return (c_sw * k) ** (1.0 / dim)


def _lattice_offsets(points: PointSet):
    """Canonical offset classes of an exact-lattice point set.

    Returns (offsets, class_sizes, distances). Every unordered pair belongs
    to exactly one class; classes where o == -o (mod side) carry n/2 pairs,
    the rest carry n.
    """
    side = int(round(points.space.side))
    n = points.n
    if side ** points.space.dim != n:
        raise InvalidInputError("offset classes require a full cubic lattice")
    dim = points.space.dim
    grids = np.meshgrid(*[np.arange(side)] * dim, indexing="ij")
    offsets = np.stack([g.ravel() for g in grids], axis=1)
    offsets = offsets[1:]  # drop the zero offset
    neg = (-offsets) % side
    # Keep one representative of {o, -o}.
    keys = offsets @ (side ** np.arange(dim - 1, -1, -1))
    neg_keys = neg @ (side ** np.arange(dim - 1, -1, -1))
    keep = keys <= neg_keys
    offsets = offsets[keep]
    self_paired = np.all(neg[keep] == offsets, axis=1)
    sizes = np.where(self_paired, n // 2, n)
    wrapped = np.minimum(offsets, side - offsets).astype(np.float64)
    p = points.space.norm_p
    if math.isinf(p):
        dists = wrapped.max(axis=1)
    else:
        dists = (wrapped ** p).sum(axis=1) ** (1.0 / p)
    return offsets, sizes, dists


def _pair_weight_profile(points: PointSet):
    """Sorted r^-dim weights with multiplicities, for calibration sums."""
    dim = points.space.dim
    n = points.n
    if points.is_lattice() and int(round(points.space.side)) ** dim == n:
        _, sizes, dists = _lattice_offsets(points)
        w = dists ** (-float(dim))
        counts = sizes.astype(np.float64)
    else:
        if n > 8192:
            raise InvalidInputError(
                "exact calibration beyond n=8192 requires a lattice point set"
            )
        chunks_w = []
        for start in range(0, n, _CHUNK_ROWS):
            stop = min(start + _CHUNK_ROWS, n)
            us = np.repeat(np.arange(start, stop), n)
            vs = np.tile(np.arange(n), stop - start)
            keep = us < vs
            d = pair_distances(points.space, points.coords, us[keep], vs[keep])
            with np.errstate(divide="ignore"):
                # coincident points yield infinite weight; the caller
                # rejects those explicitly
                chunks_w.append(d ** (-float(dim)))
        w = np.concatenate(chunks_w)
        counts = np.ones_like(w)
    order = np.argsort(w)
    return w[order], counts[order]


def calibrate_normalizer(points: PointSet, target: float | None = None) -> float:
    """Solve sum_{u<v} min(1, C * d(u,v)^-dim) = target for C by bisection.

    The default target n/2 makes the expected average degree exactly 1 at
    k = 1. The sum is monotone increasing in C, so bisection converges to
    relative tolerance 1e-6.
    """
    n = points.n
    if n < 2:
        raise InvalidInputError("need at least two points")
    if target is None:
        target = n / 2.0
    w, counts = _pair_weight_profile(points)
    if not np.isfinite(w[-1]):
        raise CalibrationError("coincident points make the pair sum degenerate")
    total_pairs = counts.sum()
    if target > total_pairs:
        raise CalibrationError(
            f"target {target} unreachable: only {total_pairs} pairs exist"
        )
    cum_counts = np.cumsum(counts)
    cum_wsum = np.cumsum(w * counts)

    def pair_sum(c: float) -> float:
        # Pairs with w >= 1/c saturate at probability 1.
        cut = np.searchsorted(w, 1.0 / c, side="left")
        below = cum_wsum[cut - 1] if cut > 0 else 0.0
        saturated = total_pairs - (cum_counts[cut - 1] if cut > 0 else 0.0)
        return c * below + saturated

    lo, hi = 1e-12, 1.0
    while pair_sum(hi) < target:
        hi *= 2.0
        if hi > 1e18:
            raise CalibrationError("bisection upper bracket exploded")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if pair_sum(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-6 * hi:
            break
    return 0.5 * (lo + hi)


def sample_single_category(
    points: PointSet,
    params: SwgParams,
    rng,
    prob_fn=None,
    method: str = "auto",
) -> np.ndarray:
    """Sample one category's edge set; each pair independent with f(d(u,v)).

    ``prob_fn`` swaps in an alternative probability curve with the same
    pair-independence semantics. ``method`` picks the sampler:

    - "pairwise": chunked Bernoulli over all pairs (any point set);
    - "offsets": per-offset-class binomial counts followed by a uniform
      draw of that many pairs within the class. For exact lattices this
      reproduces the pairwise joint distribution exactly and is far
      cheaper at large n.
    """
    if params.k == 0:
        return np.empty((0, 2), dtype=np.int64)
    n = points.n
    dim = points.space.dim
    if prob_fn is None:
        prob_fn = lambda r: edge_probability(r, params.c_sw, params.k, dim)
    lattice_ok = points.is_lattice() and int(round(points.space.side)) ** dim == n
    if method == "auto":
        method = "offsets" if (lattice_ok and n >= 4096) else "pairwise"
    if method == "offsets":
        if not lattice_ok:
            raise InvalidInputError("offset sampling requires a full cubic lattice")
        return _sample_by_offsets(points, prob_fn, rng)
    if method != "pairwise":
        raise InvalidInputError(f"unknown sampling method {method!r}")
    return _sample_pairwise(points, prob_fn, rng)


def _sample_pairwise(points: PointSet, prob_fn, rng) -> np.ndarray:
    n = points.n
    master = np.random.default_rng(rng)
    # Fixed-size row blocks with per-block derived seeds keep the draw
    # identical no matter how blocks are scheduled.
    block_seeds = master.integers(0, 2 ** 63 - 1, size=(n + _CHUNK_ROWS - 1) // _CHUNK_ROWS)
    out = []
    for b, start in enumerate(range(0, n, _CHUNK_ROWS)):
        stop = min(start + _CHUNK_ROWS, n)
        block_rng = np.random.default_rng(int(block_seeds[b]))
        us = np.repeat(np.arange(start, stop, dtype=np.int64), n)
        vs = np.tile(np.arange(n, dtype=np.int64), stop - start)
        keep = us < vs
        us, vs = us[keep], vs[keep]
        if us.size == 0:
            continue
        d = pair_distances(points.space, points.coords, us, vs)
        p = prob_fn(d)
        hit = block_rng.random(us.size) < p
        if hit.any():
            out.append(np.stack([us[hit], vs[hit]], axis=1))
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    return canonical_edges(np.concatenate(out))


def _sample_by_offsets(points: PointSet, prob_fn, rng) -> np.ndarray:
    n = points.n
    side = int(round(points.space.side))
    dim = points.space.dim
    offsets, sizes, dists = _lattice_offsets(points)
    probs = np.asarray(prob_fn(dists), dtype=np.float64)
    master = np.random.default_rng(rng)
    counts = master.binomial(sizes, np.clip(probs, 0.0, 1.0))
    coords = points.coords.astype(np.int64)
    weights = side ** np.arange(dim - 1, -1, -1)
    # Lattice cell id -> node index (handles permuted labelings).
    ids = coords @ weights
    inv = np.empty(n, dtype=np.int64)
    inv[ids] = np.arange(n, dtype=np.int64)
    out = []
    for o, size, count in zip(offsets, sizes, counts):
        if count == 0:
            continue
        if size == n:
            pool = np.arange(n, dtype=np.int64)
        else:
            # Self-paired offset: one anchor node per unordered pair.
            pool = _half_space_nodes(coords, o, side)
        if count == size:
            anchor_nodes = pool
        else:
            anchor_nodes = pool[master.choice(size, size=count, replace=False)]
        base = coords[anchor_nodes]
        partner_nodes = inv[((base + o) % side) @ weights]
        lo = np.minimum(anchor_nodes, partner_nodes)
        hi = np.maximum(anchor_nodes, partner_nodes)
        out.append(np.stack([lo, hi], axis=1))
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    return canonical_edges(np.concatenate(out))


def _half_space_nodes(coords: np.ndarray, offset: np.ndarray, side: int) -> np.ndarray:
    """For self-paired offsets, one endpoint per pair: nodes lexicographically
    below their partner."""
    partner = (coords + offset) % side
    below = np.zeros(coords.shape[0], dtype=bool)
    decided = np.zeros(coords.shape[0], dtype=bool)
    for axis in range(coords.shape[1]):
        lt = (coords[:, axis] < partner[:, axis]) & ~decided
        gt = (coords[:, axis] > partner[:, axis]) & ~decided
        below |= lt
        decided |= lt | gt
    return np.flatnonzero(below)


@dataclass
class LocalStructure:
    """Deterministic short edges added below the random layer."""

    edges: np.ndarray
    kind: str
    witness: np.ndarray | None = None

    def __post_init__(self):
        self.edges = canonical_edges(self.edges)
        if self.witness is not None:
            self.witness = canonical_edges(self.witness)
            wk = set(map(tuple, self.witness))
            ek = set(map(tuple, self.edges))
            if not wk <= ek:
                raise InvalidInputError("witness must be a subset of the local edges")


def build_local_structure(
    points: PointSet, kind: str, radius: float | None = None
) -> LocalStructure:
    """Construct the deterministic local edge set.

    - "toroidal_grid": axis-parallel unit edges with wrap; requires exact
      lattice coordinates. The grid is its own connectivity witness.
    - "threshold_graph": all pairs within ``radius``.
    """
    n = points.n
    dim = points.space.dim
    if kind == "toroidal_grid":
        if not points.is_lattice():
            raise InvalidInputError("toroidal grid requires exact lattice points")
        side = int(round(points.space.side))
        if side ** dim != n:
            raise InvalidInputError("toroidal grid requires a full cubic lattice")
        coords = points.coords.astype(np.int64)
        weights = side ** np.arange(dim - 1, -1, -1)
        ids = coords @ weights
        order = np.argsort(ids)
        inv = np.empty(n, dtype=np.int64)
        inv[ids[order]] = order
        rows = []
        for axis in range(dim):
            shifted = coords.copy()
            shifted[:, axis] = (shifted[:, axis] + 1) % side
            rows.append(np.stack([np.arange(n), inv[shifted @ weights]], axis=1))
        edges = canonical_edges(np.concatenate(rows))
        return LocalStructure(edges=edges, kind=kind, witness=edges.copy())
    if kind == "threshold_graph":
        if radius is None or radius <= 0:
            raise InvalidInputError("threshold graph needs a positive radius")
        rows = []
        for start in range(0, n, _CHUNK_ROWS):
            stop = min(start + _CHUNK_ROWS, n)
            us = np.repeat(np.arange(start, stop, dtype=np.int64), n)
            vs = np.tile(np.arange(n, dtype=np.int64), stop - start)
            keep = us < vs
            us, vs = us[keep], vs[keep]
            d = pair_distances(points.space, points.coords, us, vs)
            hit = d <= radius + 1e-12
            rows.append(np.stack([us[hit], vs[hit]], axis=1))
        return LocalStructure(edges=canonical_edges(np.concatenate(rows)), kind=kind)
    raise InvalidInputError(f"unknown local structure kind {kind!r}")


@dataclass
class MultiplexGraph:
    """Union edge set with hidden per-edge origin labels.

    ``origin_mask[e, i]`` says category i contributed edge e; ``local[e]``
    marks deterministic local edges. Reconstruction code must only see
    ``n`` and ``edges`` (use :meth:`union_view`).
    """

    n: int
    edges: np.ndarray
    origin_mask: np.ndarray
    local: np.ndarray

    def __post_init__(self):
        if self.edges.shape[0] != self.origin_mask.shape[0]:
            raise InvalidInputError("origin mask must cover every edge")
        if self.edges.shape[0] != self.local.shape[0]:
            raise InvalidInputError("local flags must cover every edge")
        uncovered = ~(self.origin_mask.any(axis=1) | self.local)
        if np.any(uncovered):
            raise InvalidInputError("every edge needs an origin category or local tag")

    @property
    def num_categories(self) -> int:
        return self.origin_mask.shape[1]

    def union_view(self) -> tuple[int, np.ndarray]:
        """The reconstruction-facing projection: node count and edges only."""
        return self.n, self.edges.copy()

    def category_edges(self, i: int) -> np.ndarray:
        return self.edges[self.origin_mask[:, i]]

    def origin_sets(self):
        """Per-edge origin labels as tuples of category ids plus 'local'."""
        for row, is_local in zip(self.origin_mask, self.local):
            cats = tuple(int(i) for i in np.flatnonzero(row))
            yield cats + (("local",) if is_local else ())


def build_multiplex(
    n: int,
    category_edge_sets: list[np.ndarray],
    local: LocalStructure | None = None,
) -> MultiplexGraph:
    """Union the per-category edge sets, recording origins per edge."""
    sets = [canonical_edges(e) for e in category_edge_sets]
    for e in sets:
        if e.size and (e.max() >= n or e.min() < 0):
            raise InvalidInputError("edge endpoint out of range")
    key_arrays = [pack_pairs(e, n) for e in sets]
    all_keys = [k for k in key_arrays]
    local_keys = None
    if local is not None and local.edges.size:
        local_keys = pack_pairs(local.edges, n)
        all_keys.append(local_keys)
    if all_keys:
        union_keys = np.unique(np.concatenate(all_keys))
    else:
        union_keys = np.empty(0, dtype=np.int64)
    edges = unpack_pairs(union_keys, n)
    origin = np.zeros((union_keys.size, len(sets)), dtype=bool)
    for i, keys in enumerate(key_arrays):
        origin[np.searchsorted(union_keys, keys), i] = True
    local_flags = np.zeros(union_keys.size, dtype=bool)
    if local_keys is not None:
        local_flags[np.searchsorted(union_keys, local_keys)] = True
    return MultiplexGraph(n=n, edges=edges, origin_mask=origin, local=local_flags)


def partition_edges(graph: MultiplexGraph, stages: int, rng) -> list[np.ndarray]:
    """Assign each non-local edge to one uniform stage; local edges are
    replicated into every stage (splitting them is not viable)."""
    if stages < 1:
        raise InvalidInputError("stages must be >= 1")
    rng = np.random.default_rng(rng)
    assignment = rng.integers(0, stages, size=graph.edges.shape[0])
    out = []
    for s in range(stages):
        keep = (assignment == s) | graph.local
        out.append(graph.edges[keep])
    return out


def build_ensemble_graph(
    ensemble: CategoryEnsemble,
    k: float,
    seed,
    local: LocalStructure | None = None,
    prob_fn=None,
    method: str = "auto",
) -> tuple[MultiplexGraph, list[SwgParams]]:
    """Calibrate, sample every category, and union the result."""
    master = np.random.default_rng(seed)
    params = []
    edge_sets = []
    for points in ensemble.categories:
        c_sw = calibrate_normalizer(points)
        par = SwgParams(k=k, c_sw=c_sw, dim=points.space.dim)
        params.append(par)
        edge_sets.append(
            sample_single_category(points, par, master, prob_fn=prob_fn, method=method)
        )
    return build_multiplex(ensemble.n, edge_sets, local=local), params
