"""Toroidal metric spaces and point sets.

A single latent category is a set of n points on a d-dimensional torus of
side R, with wrap-around lp distances. Point sets are generated one point
per unit lattice cell plus a bounded jitter, which guarantees near-uniform
density by construction: every axis-aligned unit cube holds between 1 and
``density_bound`` points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class TorusSpace:
    """A d-dimensional torus [0, side)^dim under the wrap-around lp norm."""

    dim: int
    side: float
    norm_p: float = 2.0

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInputError(f"dim must be >= 1, got {self.dim}")
        if self.side <= 0:
            raise InvalidInputError(f"side must be > 0, got {self.side}")
        if self.norm_p < 1:
            raise InvalidInputError(f"norm_p must be >= 1, got {self.norm_p}")

    @property
    def diameter(self) -> float:
        """Largest distance realizable on the torus."""
        half = self.side / 2.0
        if math.isinf(self.norm_p):
            return half
        return half * self.dim ** (1.0 / self.norm_p)


@dataclass
class PointSet:
    """Node positions in one category's torus.

    ``density_bound`` is the promised per-unit-cube maximum; the generator
    guarantees it, and :func:`check_density` verifies it by cube histogram.
    """

    space: TorusSpace
    coords: np.ndarray
    density_bound: int = 1

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=np.float64)
        if self.coords.ndim != 2 or self.coords.shape[1] != self.space.dim:
            raise InvalidInputError(
                f"coords must be (n, {self.space.dim}), got {self.coords.shape}"
            )
        if np.any(self.coords < 0) or np.any(self.coords >= self.space.side):
            raise InvalidInputError("coordinates must lie in [0, side)")

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def is_lattice(self, tol: float = 1e-12) -> bool:
        """True when every coordinate sits exactly on the integer lattice."""
        return bool(np.all(np.abs(self.coords - np.round(self.coords)) <= tol))


@dataclass
class CategoryEnsemble:
    """One PointSet per category, plus the relabeling permutations used to
    decorrelate them (kept for evaluation bookkeeping only)."""

    categories: list[PointSet]
    permutations: list[np.ndarray] | None = None

    def __post_init__(self):
        ns = {ps.n for ps in self.categories}
        if len(ns) > 1:
            raise InvalidInputError(f"categories disagree on n: {sorted(ns)}")
        if self.permutations is not None:
            for sigma in self.permutations:
                if sorted(sigma) != list(range(self.n)):
                    raise InvalidInputError("permutation is not a bijection on 0..n-1")

    @property
    def n(self) -> int:
        return self.categories[0].n

    @property
    def num_categories(self) -> int:
        return len(self.categories)


def _wrap_deltas(space: TorusSpace, diff: np.ndarray) -> np.ndarray:
    ad = np.abs(diff)
    return np.minimum(ad, space.side - ad)


def torus_distance(space: TorusSpace, a, b) -> float:
    """Wrap-around lp distance between two points."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != (space.dim,) or b.shape != (space.dim,):
        raise InvalidInputError(
            f"expected points of dimension {space.dim}, got {a.shape} and {b.shape}"
        )
    d = _wrap_deltas(space, a - b)
    if math.isinf(space.norm_p):
        return float(d.max())
    return float((d ** space.norm_p).sum() ** (1.0 / space.norm_p))


def distances_from(space: TorusSpace, point, coords: np.ndarray) -> np.ndarray:
    """Vectorized distances from one point to an (m, dim) coordinate array."""
    point = np.asarray(point, dtype=np.float64)
    d = _wrap_deltas(space, coords - point[None, :])
    if math.isinf(space.norm_p):
        return d.max(axis=1)
    return (d ** space.norm_p).sum(axis=1) ** (1.0 / space.norm_p)


def pair_distances(space: TorusSpace, coords: np.ndarray, us, vs) -> np.ndarray:
    """Distances for explicit index pairs (us[i], vs[i])."""
    d = _wrap_deltas(space, coords[us] - coords[vs])
    if math.isinf(space.norm_p):
        return d.max(axis=1)
    return (d ** space.norm_p).sum(axis=1) ** (1.0 / space.norm_p)


def ball(points: PointSet, center: int, r: float) -> np.ndarray:
    """Node ids within distance r of ``center`` (center included)."""
    if r < 0:
        raise InvalidInputError("radius must be >= 0")
    dist = distances_from(points.space, points.coords[center], points.coords)
    return np.flatnonzero(dist <= r + 1e-12)


def generate_points(
    space: TorusSpace, n: int, jitter: float, seed
) -> PointSet:
    """One point per integer lattice cell, displaced by up to ``jitter``.

    Requires side^dim >= n so the lattice has room. The construction keeps
    each point inside its (jitter-padded) cell, so any unit cube intersects
    at most 2^dim cells' points and the density invariant holds with
    density_bound <= 2^dim.
    """
    if not (0 <= jitter < 1):
        raise InvalidInputError(f"jitter must be in [0, 1), got {jitter}")
    side_cells = int(round(space.side))
    if side_cells ** space.dim < n:
        raise InvalidInputError(
            f"lattice {side_cells}^{space.dim} does not fit n={n} points"
        )
    rng = np.random.default_rng(seed)
    # Enumerate the first n cells in row-major order.
    idx = np.arange(n, dtype=np.int64)
    base = np.empty((n, space.dim), dtype=np.float64)
    rem = idx
    for axis in range(space.dim - 1, -1, -1):
        base[:, axis] = rem % side_cells
        rem = rem // side_cells
    if jitter > 0:
        base = base + rng.uniform(0.0, jitter, size=base.shape)
    base = np.mod(base, space.side)
    bound = 1 if jitter == 0 else 2 ** space.dim
    return PointSet(space=space, coords=base, density_bound=bound)


def check_density(points: PointSet) -> tuple[int, int]:
    """Cube-histogram check of the near-uniform density invariant.

    Returns (min_count, max_count) over all unit cubes of the torus.
    Raises InvalidInputError when the torus side is not an integer number
    of unit cells.
    """
    side_cells = int(round(points.space.side))
    if abs(points.space.side - side_cells) > 1e-9:
        raise InvalidInputError("density histogram requires an integer torus side")
    cells = np.floor(points.coords).astype(np.int64) % side_cells
    flat = np.zeros(side_cells ** points.space.dim, dtype=np.int64)
    key = np.zeros(points.n, dtype=np.int64)
    for axis in range(points.space.dim):
        key = key * side_cells + cells[:, axis]
    np.add.at(flat, key, 1)
    return int(flat.min()), int(flat.max())


def permute_category(points: PointSet, seed) -> tuple[PointSet, np.ndarray]:
    """Relabel nodes by a uniformly random bijection sigma.

    Node i takes the coordinates of node sigma(i). Pass ``seed=None`` for
    the identity permutation. The permutation is returned so evaluation
    code can translate between the base metric and the relabeled one.
    """
    if seed is None:
        sigma = np.arange(points.n, dtype=np.int64)
    else:
        rng = np.random.default_rng(seed)
        sigma = rng.permutation(points.n).astype(np.int64)
    return (
        PointSet(
            space=points.space,
            coords=points.coords[sigma],
            density_bound=points.density_bound,
        ),
        sigma,
    )


def epsilon_net(points: PointSet, r: float) -> np.ndarray:
    """Greedy r-net: chosen nodes are pairwise >= r apart and every node is
    within r of some chosen node."""
    if r <= 0:
        raise InvalidInputError("net radius must be > 0")
    n = points.n
    covered = np.zeros(n, dtype=bool)
    chosen = []
    for u in range(n):
        if covered[u]:
            continue
        chosen.append(u)
        dist = distances_from(points.space, points.coords[u], points.coords)
        covered |= dist <= r + 1e-12
        if covered.all():
            break
    return np.asarray(chosen, dtype=np.int64)
