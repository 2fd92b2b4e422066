"""Generate a two-category multiplex graph and look at its ground truth.

Each category is a jittered lattice on a torus, relabeled by its own random
permutation so the two metrics are locally uncorrelated. Every node pair
becomes an edge independently with probability min(1, C*k*r^-dim); the
observed network is the union, and the per-edge origin labels exist only on
the generation side.
"""

import numpy as np

import swrecon as sw

side, dim, k = 32, 2, 24.0
n = side ** dim
space = sw.TorusSpace(dim=dim, side=float(side))

categories = []
for i in range(2):
    pts = sw.generate_points(space, n, jitter=0.4, seed=10 + i)
    pts, sigma = sw.permute_category(pts, seed=20 + i)
    categories.append(pts)
    lo, hi = sw.check_density(pts)
    print(f"category {i}: density per unit cube in [{lo}, {hi}]")

ensemble = sw.CategoryEnsemble(categories=categories)

edge_sets = []
for i, pts in enumerate(categories):
    c_sw = sw.calibrate_normalizer(pts)
    params = sw.SwgParams(k=k, c_sw=c_sw, dim=dim)
    edges = sw.sample_single_category(pts, params, rng=30 + i)
    edge_sets.append(edges)
    print(
        f"category {i}: c_sw={c_sw:.4f}, local radius={(c_sw * k) ** 0.5:.2f}, "
        f"{edges.shape[0]} edges, mean degree {2 * edges.shape[0] / n:.1f}"
    )

graph = sw.build_multiplex(n, edge_sets)
shared = int(graph.origin_mask.all(axis=1).sum())
print(f"union: {graph.edges.shape[0]} edges, {shared} contributed by both categories")

# The disjointness conditions that make reconstruction possible at all.
violations = sw.check_lcd(ensemble, r_max=5.0, bound=8 * np.log(n), sample=300, rng=0)
print(f"local disjointness violations over 300 sampled ball pairs: {len(violations)}")

# What the reconstruction side is allowed to see:
n_visible, edges_visible = graph.union_view()
print(f"reconstruction input: n={n_visible}, unlabeled edges={edges_visible.shape[0]}")
