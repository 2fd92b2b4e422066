"""Undirected graph helpers shared by the reconstruction stages.

Edges travel as (m, 2) int64 arrays with u < v, sorted lexicographically.
Heavier queries go through scipy CSR adjacency or packed uint64 bitsets.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

UNREACHED = np.iinfo(np.int32).max


def canonical_edges(edges) -> np.ndarray:
    """Sort endpoints within rows, drop self-loops and duplicates, sort rows."""
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    lo = arr.min(axis=1)
    hi = arr.max(axis=1)
    keep = lo != hi
    arr = np.stack([lo[keep], hi[keep]], axis=1)
    if arr.shape[0] == 0:
        return arr
    arr = np.unique(arr, axis=0)
    return arr


def pack_pairs(edges: np.ndarray, n: int) -> np.ndarray:
    """Encode (u, v) rows as u * n + v scalars for fast set algebra."""
    return edges[:, 0].astype(np.int64) * n + edges[:, 1].astype(np.int64)


def unpack_pairs(keys: np.ndarray, n: int) -> np.ndarray:
    out = np.empty((keys.shape[0], 2), dtype=np.int64)
    out[:, 0] = keys // n
    out[:, 1] = keys % n
    return out


def edges_to_csr(n: int, edges: np.ndarray, dtype=np.int32) -> sp.csr_matrix:
    """Symmetric 0/1 adjacency in CSR form."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.shape[0] == 0:
        return sp.csr_matrix((n, n), dtype=dtype)
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    data = np.ones(rows.shape[0], dtype=dtype)
    mat = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    mat.data[:] = 1
    return mat


def csr_neighbors(adj: sp.csr_matrix, u: int) -> np.ndarray:
    return adj.indices[adj.indptr[u]:adj.indptr[u + 1]]


def degrees(n: int, edges: np.ndarray) -> np.ndarray:
    deg = np.zeros(n, dtype=np.int64)
    if edges.shape[0]:
        np.add.at(deg, edges[:, 0], 1)
        np.add.at(deg, edges[:, 1], 1)
    return deg


def bfs_hops(adj: sp.csr_matrix, source: int, max_hops: int | None = None) -> np.ndarray:
    """Hop distances from ``source``; UNREACHED marks other components."""
    limit = np.inf if max_hops is None else float(max_hops)
    dist = csgraph.dijkstra(
        adj, directed=False, indices=source, unweighted=True, limit=limit
    )
    out = np.full(adj.shape[0], UNREACHED, dtype=np.int32)
    finite = np.isfinite(dist)
    out[finite] = dist[finite].astype(np.int32)
    return out


def hop_distance(adj: sp.csr_matrix, u: int, v: int) -> float:
    d = bfs_hops(adj, u)[v]
    return float("inf") if d == UNREACHED else float(d)


def hop_diameter_of_set(adj: sp.csr_matrix, nodes: np.ndarray) -> float:
    """Max pairwise hop distance among ``nodes`` (inf when disconnected)."""
    nodes = np.asarray(nodes, dtype=np.int64)
    worst = 0.0
    for u in nodes:
        d = bfs_hops(adj, int(u))[nodes]
        if np.any(d == UNREACHED):
            return float("inf")
        worst = max(worst, float(d.max()))
    return worst


def is_connected(n: int, edges: np.ndarray) -> bool:
    if n <= 1:
        return True
    if edges.shape[0] == 0:
        return False
    ncomp, _ = csgraph.connected_components(edges_to_csr(n, edges), directed=False)
    return ncomp == 1


def count_edges_between(adj: sp.csr_matrix, group_a: np.ndarray, group_b: np.ndarray) -> int:
    """Edges with one endpoint in each (disjoint) group."""
    n = adj.shape[0]
    group_a = np.asarray(group_a, dtype=np.int64)
    if group_a.size == 0 or len(group_b) == 0:
        return 0
    mask_b = np.zeros(n, dtype=bool)
    mask_b[group_b] = True
    sub = adj[group_a]
    return int(np.count_nonzero(mask_b[sub.indices]))


class BitAdjacency:
    """Adjacency rows packed into uint64 words, for fast set intersections.

    Intersection counts use np.bitwise_count, so a row-vs-row test costs
    n/64 word operations.
    """

    def __init__(self, n: int, edges: np.ndarray | None = None, with_diagonal: bool = False):
        self.n = n
        self.words = (n + 63) // 64
        self.rows = np.zeros((n, self.words), dtype=np.uint64)
        if with_diagonal:
            idx = np.arange(n)
            self.rows[idx, idx // 64] |= np.uint64(1) << (idx % 64).astype(np.uint64)
        if edges is not None and len(edges):
            e = np.asarray(edges, dtype=np.int64)
            self._set_bits(e[:, 0], e[:, 1])
            self._set_bits(e[:, 1], e[:, 0])

    def _set_bits(self, rows_idx, cols_idx):
        w = cols_idx // 64
        b = (cols_idx % 64).astype(np.uint64)
        np.bitwise_or.at(self.rows, (rows_idx, w), np.uint64(1) << b)

    def add_edge(self, u: int, v: int):
        self.rows[u, v // 64] |= np.uint64(1) << np.uint64(v % 64)
        self.rows[v, u // 64] |= np.uint64(1) << np.uint64(u % 64)

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u, v // 64] >> np.uint64(v % 64)) & np.uint64(1))

    def intersect_count(self, u: int, v: int) -> int:
        return int(np.bitwise_count(self.rows[u] & self.rows[v]).sum())

    def row_nodes(self, u: int) -> np.ndarray:
        return bits_to_nodes(self.rows[u])

    def degree(self, u: int) -> int:
        return int(np.bitwise_count(self.rows[u]).sum())


def nodes_to_bits(nodes: np.ndarray, n: int) -> np.ndarray:
    words = (n + 63) // 64
    out = np.zeros(words, dtype=np.uint64)
    nodes = np.asarray(nodes, dtype=np.int64)
    np.bitwise_or.at(out, nodes // 64, np.uint64(1) << (nodes % 64).astype(np.uint64))
    return out


def bits_to_nodes(bits: np.ndarray) -> np.ndarray:
    unpacked = np.unpackbits(bits.view(np.uint8), bitorder="little")
    return np.flatnonzero(unpacked)


def popcount(bits: np.ndarray) -> int:
    return int(np.bitwise_count(bits).sum())
