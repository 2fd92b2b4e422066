"""Category-disjointness condition checkers and the permutation tail oracle.

Two latent categories are usable together only when their metrics look
uncorrelated at small scales. The local condition bounds the overlap of any
two small balls from distinct categories; the global condition bounds, for
disjoint same-category balls B and B', the number of cross pairs that are
close in another category. Both quantify over all balls, which is infeasible
beyond desk scale, so the checkers sample ball pairs and switch to exhaustive
enumeration below a size cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .torus import CategoryEnsemble, PointSet, ball, distances_from

EXHAUSTIVE_CUTOFF = 256


@dataclass
class CdViolation:
    """One ball pair whose overlap (or cross-pair count) exceeds its bound."""

    categories: tuple[int, int]
    centers: tuple[int, int]
    radii: tuple[float, float]
    overlap: int
    bound: float

    def __post_init__(self):
        if self.overlap <= self.bound:
            raise InvalidInputError("a violation must exceed its bound")


def _ball_members(points: PointSet, center: int, r: float) -> np.ndarray:
    return ball(points, center, r)


def check_lcd(
    ensemble: CategoryEnsemble,
    r_max: float,
    bound: float,
    sample: int,
    rng,
) -> list[CdViolation]:
    """Report cross-category ball pairs whose intersection exceeds ``bound``.

    Below EXHAUSTIVE_CUTOFF nodes all center pairs are checked at radius
    r_max (overlaps are monotone in the radii, so the largest radius is the
    binding case); larger instances draw ``sample`` random pairs with
    uniform radii in (0, r_max].
    """
    if bound < 1:
        raise InvalidInputError("bound must be >= 1")
    k = ensemble.num_categories
    if k < 2:
        return []
    rng = np.random.default_rng(rng)
    n = ensemble.n
    violations: list[CdViolation] = []

    if n <= EXHAUSTIVE_CUTOFF:
        for i in range(k):
            for j in range(i + 1, k):
                members_i = [_ball_members(ensemble.categories[i], u, r_max) for u in range(n)]
                members_j = [_ball_members(ensemble.categories[j], u, r_max) for u in range(n)]
                mask = np.zeros(n, dtype=bool)
                for u in range(n):
                    mask[:] = False
                    mask[members_i[u]] = True
                    for v in range(n):
                        overlap = int(np.count_nonzero(mask[members_j[v]]))
                        if overlap > bound:
                            violations.append(
                                CdViolation((i, j), (u, v), (r_max, r_max), overlap, bound)
                            )
        return violations

    for _ in range(sample):
        i, j = rng.choice(k, size=2, replace=False)
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        ri = float(rng.uniform(0, r_max))
        rj = float(rng.uniform(0, r_max))
        bi = _ball_members(ensemble.categories[i], u, ri)
        bj = _ball_members(ensemble.categories[j], v, rj)
        overlap = int(np.intersect1d(bi, bj, assume_unique=True).size)
        if overlap > bound:
            violations.append(CdViolation((int(i), int(j)), (u, v), (ri, rj), overlap, bound))
    return violations


def lcd_oracle(
    ensemble: CategoryEnsemble, r_max: float, bound: float
) -> list[tuple[int, int, int, int, int]]:
    """Naive double-loop intersection counter used to cross-check check_lcd.

    Balls are materialized as Python sets and intersected directly.
    Returns (cat_i, cat_j, u, v, overlap) tuples for every violating pair.
    """
    k = ensemble.num_categories
    n = ensemble.n

    def ball_set(points: PointSet, center: int) -> set[int]:
        members = set()
        for w in range(n):
            d = points.coords[center] - points.coords[w]
            d = np.abs(d)
            d = np.minimum(d, points.space.side - d)
            p = points.space.norm_p
            dist = float((d ** p).sum() ** (1.0 / p))
            if dist <= r_max + 1e-12:
                members.add(w)
        return members

    out = []
    for i in range(k):
        for j in range(i + 1, k):
            balls_i = [ball_set(ensemble.categories[i], u) for u in range(n)]
            balls_j = [ball_set(ensemble.categories[j], v) for v in range(n)]
            for u in range(n):
                for v in range(n):
                    overlap = len(balls_i[u] & balls_j[v])
                    if overlap > bound:
                        out.append((i, j, u, v, overlap))
    return out


def count_close_cross_pairs(
    points_j: PointSet, group_a: np.ndarray, group_b: np.ndarray, r: float
) -> int:
    """pairs_j(B, B', r): cross pairs at category-j distance below r."""
    group_a = np.asarray(group_a, dtype=np.int64)
    group_b = np.asarray(group_b, dtype=np.int64)
    if group_a.size == 0 or group_b.size == 0:
        return 0
    coords = points_j.coords
    space = points_j.space
    diff = np.abs(coords[group_a][:, None, :] - coords[group_b][None, :, :])
    diff = np.minimum(diff, space.side - diff)
    p = space.norm_p
    if math.isinf(p):
        d = diff.max(axis=2)
    else:
        d = (diff ** p).sum(axis=2) ** (1.0 / p)
    return int(np.count_nonzero(d < r))


def check_global_cd(
    ensemble: CategoryEnsemble,
    scale: float,
    sample: int,
    rng,
    c1: float = 4.0,
    c2: float = 4.0,
) -> list[CdViolation]:
    """Sampled check of the global disjointness condition.

    Draws disjoint same-category ball pairs (B, B') with |B| * |B'| <=
    scale^dim and radii r in (0, scale], counts cross pairs close in another
    category by brute force, and flags counts above
    c1 * (r^dim / n) * |B| * |B'| + c2 * log^2 n   (natural log).
    """
    if scale <= 0:
        raise InvalidInputError("scale must be > 0")
    k = ensemble.num_categories
    if k < 2:
        return []
    rng = np.random.default_rng(rng)
    n = ensemble.n
    log2n = math.log(n) ** 2
    violations: list[CdViolation] = []
    attempts = 0
    found = 0
    max_attempts = sample * 20
    while found < sample and attempts < max_attempts:
        attempts += 1
        i = int(rng.integers(k))
        j = int(rng.integers(k))
        if j == i:
            continue
        pi = ensemble.categories[i]
        dim = pi.space.dim
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        ru = float(rng.uniform(0, scale))
        rv = float(rng.uniform(0, scale))
        centers_d = distances_from(pi.space, pi.coords[u], pi.coords[v:v + 1])[0]
        if centers_d <= ru + rv:
            continue  # balls must be disjoint
        bu = _ball_members(pi, u, ru)
        bv = _ball_members(pi, v, rv)
        if bu.size == 0 or bv.size == 0 or bu.size * bv.size > scale ** dim:
            continue
        r = float(rng.uniform(0, scale))
        found += 1
        count = count_close_cross_pairs(ensemble.categories[j], bu, bv, r)
        bound = c1 * (r ** dim / n) * bu.size * bv.size + c2 * log2n
        if count > bound:
            violations.append(CdViolation((i, j), (u, v), (ru, rv), count, bound))
    return violations


@dataclass
class TailCell:
    delta: float
    mu: float
    empirical: float
    bound: float
    std_err: float

    @property
    def within(self) -> bool:
        return self.empirical <= self.bound + 3 * self.std_err


@dataclass
class TailReport:
    n: int
    trials: int
    mu: float
    cells: list[TailCell]

    def failing_cells(self, min_mu_delta_sq: float = 9.0) -> list[TailCell]:
        return [
            c
            for c in self.cells
            if c.mu * c.delta ** 2 >= min_mu_delta_sq and not c.within
        ]


def permutation_chernoff_check(
    n: int,
    index_set_size: int,
    weights,
    trials: int,
    rng,
    deltas=(0.25, 0.5, 0.75, 1.0, 1.5, 2.0),
) -> TailReport:
    """Monte Carlo tail check for sums over a random permutation.

    X = sum_i alpha_i * 1[sigma(i) in I] for uniform sigma. For each delta
    the empirical two-sided tail P(|X - mu| > delta * mu) is compared with
    exp(-mu * delta^2 / 3).
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (n,):
        raise InvalidInputError("weights must have length n")
    if np.any(weights < 0) or np.any(weights > 1):
        raise InvalidInputError("weights must lie in [0, 1]")
    if not (0 <= index_set_size <= n):
        raise InvalidInputError("index set size out of range")
    rng = np.random.default_rng(rng)
    mu = weights.sum() * index_set_size / n
    xs = np.empty(trials, dtype=np.float64)
    for t in range(trials):
        sigma = rng.permutation(n)
        xs[t] = weights[sigma < index_set_size].sum()
    cells = []
    for delta in deltas:
        if mu == 0:
            emp = float(np.mean(np.abs(xs - mu) > 0))
            bound = 1.0
        else:
            emp = float(np.mean(np.abs(xs - mu) > delta * mu))
            bound = math.exp(-mu * delta ** 2 / 3.0)
        se = math.sqrt(max(emp * (1 - emp), bound * (1 - bound), 1e-12) / trials)
        cells.append(TailCell(delta=delta, mu=mu, empirical=emp, bound=bound, std_err=se))
    return TailReport(n=n, trials=trials, mu=mu, cells=cells)
