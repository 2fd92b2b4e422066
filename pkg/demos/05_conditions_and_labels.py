"""Disjointness conditions, permutation tails, and beacon distance labels.

Random relabeling makes any two fixed metrics locally uncorrelated: ball
overlaps concentrate around |B||B'|/n, with the tail controlled by a
Chernoff bound for sums over random permutations. Beacon labels compress a
spanner's distances into per-node lists a few hundred entries long.
"""

import math

import numpy as np

import swrecon as sw
from swrecon.graphs import bfs_hops, edges_to_csr

side = 32
n = side * side
space = sw.TorusSpace(dim=2, side=float(side))
cats = []
for i in range(2):
    pts, _ = sw.permute_category(
        sw.generate_points(space, n, jitter=0.4, seed=i), seed=40 + i
    )
    cats.append(pts)
ensemble = sw.CategoryEnsemble(categories=cats)

lcd = sw.check_lcd(ensemble, r_max=5.0, bound=8 * math.log(n), sample=400, rng=0)
gcd = sw.check_global_cd(ensemble, scale=n ** 0.25, sample=200, rng=1)
print(f"local disjointness violations: {len(lcd)}; global: {len(gcd)}")

report = sw.permutation_chernoff_check(
    n=1000, index_set_size=100, weights=np.ones(1000), trials=5000, rng=2
)
print(f"permutation tail check (mu={report.mu:.0f}):")
for cell in report.cells:
    flag = "ok" if cell.within else "VIOLATION"
    print(
        f"  delta={cell.delta:4.2f}: empirical {cell.empirical:.2e} "
        f"vs bound {cell.bound:.2e} [{flag}]"
    )

# Beacon labels over the toroidal grid as a stand-in spanner.
grid = sw.build_local_structure(
    sw.generate_points(space, n, 0.0, 0), "toroidal_grid"
)
labels = sw.build_distance_labels(grid.edges, n, rng=3)
print(f"\nlabel scales: {labels.scales}; average label size {labels.average_size():.0f}")
adj = edges_to_csr(n, grid.edges)
rng = np.random.default_rng(4)
worst = 0.0
for _ in range(300):
    u, v = map(int, rng.integers(0, n, size=2))
    if u == v:
        continue
    exact = float(bfs_hops(adj, u)[v])
    est = sw.label_query(labels, u, v, 1.0)
    worst = max(worst, est / exact)
print(f"worst label overestimate over 300 pairs: factor {worst:.2f}")
