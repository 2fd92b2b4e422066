"""Distortion fitting and category-assignment quality.

Distortion is reported as curves rather than one (contraction, expansion,
additive) triple: the bound family is two-parameter, and a single fitted
triple hides the trade-off. Category quality matches discovered edge sets
to true categories by brute-force bijection and scores short-edge recall
and long-edge contamination, the two quantities the growth stage promises.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .graphs import pack_pairs
from .torus import CategoryEnsemble, pair_distances


@dataclass
class DistortionReport:
    contraction: float
    expansion_curve: list[tuple[float, float]]
    bucket_errors: list[dict]
    violation_budget_used: float
    n_pairs: int
    zero_true_excluded: int

    def expansion_at(self, delta: float) -> float:
        for d, c in self.expansion_curve:
            if d == delta:
                return c
        raise KeyError(f"delta {delta} not on the evaluated grid")


def evaluate_distortion(
    true_values,
    est_values,
    delta_grid=(0.0,),
    claim: tuple[float, float, float] | None = None,
) -> DistortionReport:
    """Fit contraction and the expansion-vs-additive-offset curve.

    contraction = min est/true; expansion_at(delta) = max (est-delta)+/true.
    Zero-distance pairs are excluded from ratios and counted. ``claim`` is
    an optional (contraction, expansion, additive) bound; the fraction of
    pairs violating it is reported as violation_budget_used.
    """
    true_values = np.asarray(true_values, dtype=np.float64)
    est_values = np.asarray(est_values, dtype=np.float64)
    if true_values.shape != est_values.shape or true_values.ndim != 1:
        raise InvalidInputError("true and estimated values must be 1-d and aligned")
    zero = true_values <= 0
    usable = ~zero
    if not np.any(usable):
        raise InvalidInputError("no usable pairs with positive true distance")
    t = true_values[usable]
    e = est_values[usable]
    contraction = float(np.min(e / t))
    curve = []
    for delta in delta_grid:
        curve.append((float(delta), float(np.max(np.maximum(e - delta, 0.0) / t))))
    order = np.argsort(t)
    t_sorted, e_sorted = t[order], e[order]
    buckets = []
    edges_idx = np.linspace(0, t.size, 11).astype(int)
    for b in range(10):
        lo, hi = edges_idx[b], edges_idx[b + 1]
        if hi <= lo:
            continue
        err = np.abs(e_sorted[lo:hi] - t_sorted[lo:hi])
        buckets.append(
            {
                "true_lo": float(t_sorted[lo]),
                "true_hi": float(t_sorted[hi - 1]),
                "count": int(hi - lo),
                "q10": float(np.quantile(err, 0.10)),
                "q50": float(np.quantile(err, 0.50)),
                "q90": float(np.quantile(err, 0.90)),
            }
        )
    violation = 0.0
    if claim is not None:
        lam, expan, delta = claim
        bad = (e < lam * t) | (e > expan * t + delta)
        violation = float(np.mean(bad))
    return DistortionReport(
        contraction=contraction,
        expansion_curve=curve,
        bucket_errors=buckets,
        violation_budget_used=violation,
        n_pairs=int(t.size),
        zero_true_excluded=int(np.count_nonzero(zero)),
    )


@dataclass
class CategoryScore:
    true_category: int
    discovered_index: int
    short_total: int
    short_recovered: int
    discovered_total: int
    discovered_short: int
    contamination: int

    @property
    def recall(self) -> float:
        return self.short_recovered / self.short_total if self.short_total else 1.0

    @property
    def precision(self) -> float:
        return self.discovered_short / self.discovered_total if self.discovered_total else 1.0


@dataclass
class CategoryReport:
    matching: list[int]
    scores: list[CategoryScore]

    @property
    def min_recall(self) -> float:
        return min(s.recall for s in self.scores)

    @property
    def total_contamination(self) -> int:
        return sum(s.contamination for s in self.scores)


def _edge_distance_per_category(
    ensemble: CategoryEnsemble, edges: np.ndarray
) -> np.ndarray:
    out = np.empty((edges.shape[0], ensemble.num_categories))
    for i, pts in enumerate(ensemble.categories):
        out[:, i] = pair_distances(pts.space, pts.coords, edges[:, 0], edges[:, 1])
    return out


def evaluate_categories(
    ensemble: CategoryEnsemble,
    pruned_pairs: np.ndarray,
    discovered: list[np.ndarray],
    local_r: float,
    amoeba_r: float,
) -> CategoryReport:
    """Score discovered edge sets against ground truth.

    An edge counts for category i's recall when its category-i distance is
    at most local_r; it counts as contamination when its category-i
    distance exceeds amoeba_r. The bijection between discovered sets and
    true categories maximizes summed recall (brute force over K!, K <= 6).
    """
    k = ensemble.num_categories
    if k > 6:
        raise InvalidInputError("brute-force matching supports at most 6 categories")
    if len(discovered) != k:
        raise InvalidInputError("need one discovered set per category")
    n = ensemble.n
    pruned_pairs = np.asarray(pruned_pairs, dtype=np.int64)
    dist = _edge_distance_per_category(ensemble, pruned_pairs)
    short_mask = dist <= local_r + 1e-12  # (pruned_edges, K)
    pruned_keys = pack_pairs(pruned_pairs, n)

    member_masks = []
    disc_dists = []
    for edges in discovered:
        keys = pack_pairs(np.asarray(edges, dtype=np.int64), n)
        member_masks.append(np.isin(pruned_keys, keys))
        disc_dists.append(
            _edge_distance_per_category(ensemble, np.asarray(edges, dtype=np.int64))
        )

    def recall_matrix():
        rec = np.zeros((k, k))
        for i in range(k):  # true category
            total = int(short_mask[:, i].sum())
            for j in range(k):  # discovered index
                got = int((short_mask[:, i] & member_masks[j]).sum())
                rec[i, j] = got / total if total else 1.0
        return rec

    rec = recall_matrix()
    best_perm, best_sum = None, -1.0
    for perm in itertools.permutations(range(k)):
        s = sum(rec[i, perm[i]] for i in range(k))
        if s > best_sum:
            best_sum, best_perm = s, perm

    scores = []
    for i in range(k):
        j = best_perm[i]
        total = int(short_mask[:, i].sum())
        got = int((short_mask[:, i] & member_masks[j]).sum())
        disc_total = int(discovered[j].shape[0])
        disc_short = int(np.count_nonzero(disc_dists[j][:, i] <= local_r + 1e-12))
        contamination = int(np.count_nonzero(disc_dists[j][:, i] > amoeba_r))
        scores.append(
            CategoryScore(
                true_category=i,
                discovered_index=j,
                short_total=total,
                short_recovered=got,
                discovered_total=disc_total,
                discovered_short=disc_short,
                contamination=contamination,
            )
        )
    return CategoryReport(matching=list(best_perm), scores=scores)


def stratified_pairs(
    ensemble_points,
    n_pairs: int,
    rng,
    category: int = 0,
    oversample: int = 20,
) -> np.ndarray:
    """Sample node pairs stratified by true-distance decile.

    Uniform pair sampling oversamples large distances on a torus; sampling
    within deciles of an oversampled pool flattens the profile.
    """
    points = ensemble_points.categories[category] if isinstance(
        ensemble_points, CategoryEnsemble
    ) else ensemble_points
    rng = np.random.default_rng(rng)
    n = points.n
    pool = n_pairs * oversample
    us = rng.integers(0, n, size=pool)
    vs = rng.integers(0, n, size=pool)
    keep = us != vs
    us, vs = us[keep], vs[keep]
    d = pair_distances(points.space, points.coords, us, vs)
    # Equal-width distance bins sampled evenly, so short pairs are not
    # drowned out by the quadratically larger far-pair mass.
    bins = np.linspace(d.min(), d.max() * (1 + 1e-9), 11)
    which = np.digitize(d, bins) - 1
    per_bin = max(1, n_pairs // 10)
    chosen = []
    for b in range(10):
        members = np.flatnonzero(which == b)
        if members.size == 0:
            continue
        take = members[rng.permutation(members.size)[:per_bin]]
        chosen.append(take)
    idx = np.concatenate(chosen)
    out = np.stack([us[idx], vs[idx]], axis=1)
    lo = np.minimum(out[:, 0], out[:, 1])
    hi = np.maximum(out[:, 0], out[:, 1])
    return np.unique(np.stack([lo, hi], axis=1), axis=0)
