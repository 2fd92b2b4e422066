"""Symmetric distance oracles behind one query interface.

Every reconstruction stage consumes distances through :class:`DistanceEstimate`:
a dense matrix, the true metric, a spanner queried by BFS, beacon labels, or
a base estimate overlaid with refined pair values. ``row(u)`` returns the
estimated distance from u to every node, which is what nearest-neighbor ball
queries need.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .graphs import UNREACHED, bfs_hops
from .torus import PointSet, distances_from


class DistanceEstimate:
    """Interface: symmetric, zero diagonal, nonnegative."""

    n: int

    def row(self, u: int) -> np.ndarray:
        raise NotImplementedError

    def value(self, u: int, v: int) -> float:
        return float(self.row(u)[v])


class DenseEstimate(DistanceEstimate):
    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidInputError("estimate matrix must be square")
        self.matrix = matrix
        self.n = matrix.shape[0]

    def row(self, u: int) -> np.ndarray:
        return self.matrix[u]


class MetricEstimate(DistanceEstimate):
    """True distances of a point set, optionally divided by a normalizer."""

    def __init__(self, points: PointSet, normalizer: float = 1.0):
        self.points = points
        self.normalizer = float(normalizer)
        self.n = points.n

    def row(self, u: int) -> np.ndarray:
        d = distances_from(self.points.space, self.points.coords[u], self.points.coords)
        return d / self.normalizer

    def value(self, u: int, v: int) -> float:
        d = distances_from(
            self.points.space, self.points.coords[u], self.points.coords[v:v + 1]
        )
        return float(d[0]) / self.normalizer


class SpannerEstimate(DistanceEstimate):
    """BFS hop counts on a spanner graph, times a length scale.

    Rows are cached because nearest-neighbor queries revisit sources.
    """

    def __init__(self, adj, scale: float, cache_rows: int = 4096):
        self.adj = adj
        self.scale = float(scale)
        self.n = adj.shape[0]
        self._cache: dict[int, np.ndarray] = {}
        self._cache_rows = cache_rows

    def hop_row(self, u: int) -> np.ndarray:
        hops = self._cache.get(u)
        if hops is None:
            hops = bfs_hops(self.adj, u)
            if len(self._cache) >= self._cache_rows:
                self._cache.pop(next(iter(self._cache)))
            self._cache[u] = hops
        return hops

    def row(self, u: int) -> np.ndarray:
        hops = self.hop_row(u)
        out = hops.astype(np.float64) * self.scale
        out[hops == UNREACHED] = np.inf
        return out


class OverlayEstimate(DistanceEstimate):
    """A base estimate with per-pair overrides (refined values)."""

    def __init__(self, base: DistanceEstimate):
        self.base = base
        self.n = base.n
        self.overrides: dict[tuple[int, int], float] = {}

    @staticmethod
    def _key(u: int, v: int) -> tuple[int, int]:
        return (u, v) if u < v else (v, u)

    def set_value(self, u: int, v: int, value: float):
        self.overrides[self._key(u, v)] = float(value)

    def overridden_partners(self, u: int):
        for (a, b) in self.overrides:
            if a == u:
                yield b
            elif b == u:
                yield a

    def row(self, u: int) -> np.ndarray:
        out = np.array(self.base.row(u), dtype=np.float64, copy=True)
        for (a, b), val in self.overrides.items():
            if a == u:
                out[b] = val
            elif b == u:
                out[a] = val
        out[u] = 0.0
        return out

    def value(self, u: int, v: int) -> float:
        key = self._key(u, v)
        if key in self.overrides:
            return self.overrides[key]
        return self.base.value(u, v)


def knn_ball(est: DistanceEstimate, u: int, kappa: int) -> np.ndarray:
    """The kappa nodes with smallest estimated distance from u.

    u itself is included (distance 0). Ties break by ascending node id, so
    repeated calls return the identical set. A partition prefilter keeps
    the (value, id) sort on a small candidate slice.
    """
    if not (1 <= kappa <= est.n):
        raise InvalidInputError(f"kappa must be in [1, {est.n}], got {kappa}")
    row = est.row(u)
    n = est.n
    if kappa == n:
        return np.arange(n, dtype=np.int64)
    part = np.argpartition(row, kappa - 1)
    threshold = row[part[kappa - 1]]
    candidates = np.flatnonzero(row <= threshold)
    if candidates.size == kappa:
        return np.sort(candidates.astype(np.int64))
    order = np.lexsort((candidates, row[candidates]))
    return np.sort(candidates[order[:kappa]].astype(np.int64))
