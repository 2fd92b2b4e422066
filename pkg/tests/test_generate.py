"""Graph generation: calibration, sampling, union, local edges, stages."""

import numpy as np
import pytest

import swrecon as sw
from swrecon.errors import InvalidInputError
from swrecon.generate import edge_probability
from swrecon.graphs import bfs_hops, edges_to_csr, pack_pairs
from swrecon.torus import pair_distances


def two_point_set(distance, side=8.0):
    space = sw.TorusSpace(dim=1, side=side)
    return sw.PointSet(
        space=space, coords=np.array([[0.0], [distance]]), density_bound=2
    )


def test_calibrate_two_points_closed_form():
    pts = two_point_set(2.0)
    # One pair: min(1, C / 2) = 1 requires C = 2 at the n/2 = 1 target.
    assert sw.calibrate_normalizer(pts) == pytest.approx(2.0, rel=1e-6)


def test_calibrate_monotone_in_target():
    space = sw.TorusSpace(dim=2, side=8.0)
    pts = sw.generate_points(space, 64, 0.3, 0)
    c1 = sw.calibrate_normalizer(pts, target=10.0)
    c2 = sw.calibrate_normalizer(pts, target=20.0)
    assert c2 >= c1


def brute_force_bisection(points, target):
    """Independent oracle: materialize all pair distances, plain bisection."""
    n = points.n
    us, vs = np.triu_indices(n, k=1)
    d = pair_distances(points.space, points.coords, us, vs)
    w = d ** (-float(points.space.dim))

    def total(c):
        return float(np.minimum(1.0, c * w).sum())

    lo, hi = 1e-12, 1.0
    while total(hi) < target:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if total(mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def test_calibrate_against_oracle_grid32():
    space = sw.TorusSpace(dim=2, side=32.0)
    pts = sw.generate_points(space, 1024, 0.0, 0)
    got = sw.calibrate_normalizer(pts)
    want = brute_force_bisection(pts, 512.0)
    assert got == pytest.approx(want, rel=1e-6)


def test_calibrate_jittered_against_oracle():
    space = sw.TorusSpace(dim=2, side=16.0)
    pts = sw.generate_points(space, 256, 0.35, 5)
    got = sw.calibrate_normalizer(pts)
    want = brute_force_bisection(pts, 128.0)
    assert got == pytest.approx(want, rel=1e-6)


def test_sample_zero_degree_empty():
    space = sw.TorusSpace(dim=2, side=8.0)
    pts = sw.generate_points(space, 64, 0.0, 0)
    par = sw.SwgParams(k=0.0, c_sw=0.1, dim=2)
    assert sw.sample_single_category(pts, par, 0).shape == (0, 2)


def test_sample_clamped_pair_always_present():
    pts = two_point_set(2.0)
    par = sw.SwgParams(k=1.0, c_sw=2.0, dim=1)  # f(2) = min(1, 2/2) = 1
    for seed in range(100):
        edges = sw.sample_single_category(pts, par, seed)
        assert edges.shape[0] == 1


def test_sample_marginal_frequency():
    pts = two_point_set(4.0)
    par = sw.SwgParams(k=1.0, c_sw=1.0, dim=1)  # f(4) = 0.25
    hits = sum(
        sw.sample_single_category(pts, par, seed).shape[0] for seed in range(10_000)
    )
    freq = hits / 10_000
    assert abs(freq - 0.25) <= 0.013  # 3 binomial sigma


def test_sample_per_bucket_frequencies():
    # Six collinear points give pairs across several distances; every
    # pair's empirical frequency over 10^4 reseeds must sit within 3
    # binomial sigma of f(d) = min(1, c d^-1).
    space = sw.TorusSpace(dim=1, side=32.0)
    coords = np.array([[0.0], [1.0], [3.0], [7.0], [12.0], [20.0]])
    pts = sw.PointSet(space=space, coords=coords, density_bound=6)
    par = sw.SwgParams(k=1.0, c_sw=2.0, dim=1)
    reseeds = 10_000
    counts = {}
    for seed in range(reseeds):
        for u, v in sw.sample_single_category(pts, par, seed):
            counts[(int(u), int(v))] = counts.get((int(u), int(v)), 0) + 1
    us, vs = np.triu_indices(6, k=1)
    d = pair_distances(space, coords, us, vs)
    probs = np.minimum(1.0, 2.0 / d)
    for u, v, p in zip(us, vs, probs):
        freq = counts.get((int(u), int(v)), 0) / reseeds
        sigma = (p * (1 - p) / reseeds) ** 0.5
        assert abs(freq - p) <= 3 * sigma + 1e-9, (u, v, p, freq)


def test_offset_sampler_matches_pairwise_statistics():
    space = sw.TorusSpace(dim=2, side=8.0)
    pts = sw.generate_points(space, 64, 0.0, 0)
    c = sw.calibrate_normalizer(pts)
    par = sw.SwgParams(k=2.0, c_sw=c, dim=2)
    reps = 400
    m_off = np.mean(
        [
            sw.sample_single_category(pts, par, s, method="offsets").shape[0]
            for s in range(reps)
        ]
    )
    m_pair = np.mean(
        [
            sw.sample_single_category(pts, par, s, method="pairwise").shape[0]
            for s in range(reps, 2 * reps)
        ]
    )
    # Identical joint distribution -> matching expected edge counts.
    assert abs(m_off - m_pair) / m_pair < 0.05
    # Clamped pairs always present under both samplers.
    local_r = (c * 2.0) ** 0.5
    for s in (0, 1):
        edges = sw.sample_single_category(pts, par, s, method="offsets")
        d = pair_distances(space, pts.coords, edges[:, 0], edges[:, 1])
        keys = pack_pairs(edges, 64)
        us, vs = np.triu_indices(64, k=1)
        alld = pair_distances(space, pts.coords, us, vs)
        must = pack_pairs(
            np.stack([us[alld <= local_r], vs[alld <= local_r]], axis=1), 64
        )
        assert np.isin(must, keys).all()


def test_expected_degree_at_unit_target():
    space = sw.TorusSpace(dim=2, side=32.0)
    pts = sw.generate_points(space, 1024, 0.0, 0)
    c = sw.calibrate_normalizer(pts)
    par = sw.SwgParams(k=1.0, c_sw=c, dim=2)
    degs = [
        2 * sw.sample_single_category(pts, par, s).shape[0] / 1024 for s in range(100)
    ]
    assert abs(np.mean(degs) - 1.0) <= 0.1


def test_pluggable_probability_function():
    pts = two_point_set(4.0)
    par = sw.SwgParams(k=1.0, c_sw=1.0, dim=1)
    edges = sw.sample_single_category(
        pts, par, 0, prob_fn=lambda r: np.ones_like(np.asarray(r))
    )
    assert edges.shape[0] == 1


def test_build_multiplex_disjoint_union():
    a = np.array([[0, 1], [2, 3]])
    b = np.array([[4, 5]])
    g = sw.build_multiplex(6, [a, b])
    assert g.edges.shape[0] == 3
    assert g.origin_mask.sum() == 3


def test_build_multiplex_shared_edge_origin():
    a = np.array([[0, 1]])
    b = np.array([[0, 1], [1, 2]])
    g = sw.build_multiplex(3, [a, b])
    row = g.origin_mask[np.all(g.edges == [0, 1], axis=1)][0]
    assert row.tolist() == [True, True]


def test_build_multiplex_single_category_identity():
    a = np.array([[0, 1], [1, 2], [0, 3]])
    g = sw.build_multiplex(4, [a])
    assert set(map(tuple, g.edges)) == set(map(tuple, a))
    assert g.origin_mask.all()


def test_ground_truth_preserved():
    space = sw.TorusSpace(dim=2, side=8.0)
    pts = sw.generate_points(space, 64, 0.0, 0)
    c = sw.calibrate_normalizer(pts)
    par = sw.SwgParams(k=3.0, c_sw=c, dim=2)
    sets = [sw.sample_single_category(pts, par, s) for s in (1, 2)]
    g = sw.build_multiplex(64, sets)
    for i, edges in enumerate(sets):
        got = g.category_edges(i)
        assert np.array_equal(got, edges)


def test_local_grid_degree():
    space = sw.TorusSpace(dim=2, side=8.0)
    pts = sw.generate_points(space, 64, 0.0, 0)
    grid = sw.build_local_structure(pts, "toroidal_grid")
    deg = np.zeros(64, dtype=int)
    np.add.at(deg, grid.edges[:, 0], 1)
    np.add.at(deg, grid.edges[:, 1], 1)
    assert np.all(deg == 4)
    assert np.array_equal(grid.witness, grid.edges)


def test_local_grid_three_disjoint_paths():
    # Every grid edge supports three edge-disjoint paths of lengths 1, 3, 3.
    space = sw.TorusSpace(dim=2, side=8.0)
    pts = sw.generate_points(space, 64, 0.0, 0)
    grid = sw.build_local_structure(pts, "toroidal_grid")
    for u, v in grid.edges[:16]:
        assert sw.has_p_disjoint_bounded_paths(64, grid.edges, int(u), int(v), 3, 3)


def test_local_threshold_complete():
    space = sw.TorusSpace(dim=2, side=4.0)
    pts = sw.generate_points(space, 16, 0.0, 0)
    local = sw.build_local_structure(
        pts, "threshold_graph", radius=space.diameter + 1
    )
    assert local.edges.shape[0] == 16 * 15 // 2


def test_local_grid_rejects_jitter():
    space = sw.TorusSpace(dim=2, side=8.0)
    pts = sw.generate_points(space, 64, 0.3, 0)
    with pytest.raises(InvalidInputError):
        sw.build_local_structure(pts, "toroidal_grid")


def test_grid_is_exact_l1_spanner():
    space = sw.TorusSpace(dim=2, side=16.0, norm_p=1.0)
    pts = sw.generate_points(space, 256, 0.0, 0)
    grid = sw.build_local_structure(pts, "toroidal_grid")
    adj = edges_to_csr(256, grid.edges)
    for u in range(0, 256, 16):
        hops = bfs_hops(adj, u)
        d = pair_distances(space, pts.coords, np.full(256, u), np.arange(256))
        assert np.allclose(hops, d)


def test_partition_single_stage():
    g = sw.build_multiplex(6, [np.array([[0, 1], [2, 3], [4, 5]])])
    parts = sw.partition_edges(g, 1, 0)
    assert len(parts) == 1
    assert np.array_equal(parts[0], g.edges)


def test_partition_exact_cover():
    space = sw.TorusSpace(dim=2, side=8.0)
    pts = sw.generate_points(space, 64, 0.0, 0)
    par = sw.SwgParams(k=4.0, c_sw=sw.calibrate_normalizer(pts), dim=2)
    g = sw.build_multiplex(64, [sw.sample_single_category(pts, par, 0)])
    parts = sw.partition_edges(g, 3, 1)
    keys = [set(map(tuple, p)) for p in parts]
    union = set().union(*keys)
    assert union == set(map(tuple, g.edges))
    for e in map(tuple, g.edges):
        assert sum(e in k for k in keys) == 1  # non-local edges in one stage


def test_partition_local_replicated():
    edges = np.array([[0, 1], [1, 2], [2, 3]])
    local = sw.LocalStructure(edges=np.array([[0, 1]]), kind="custom")
    g = sw.build_multiplex(4, [edges], local=local)
    parts = sw.partition_edges(g, 4, 2)
    for p in parts:
        assert (0, 1) in set(map(tuple, p))


def test_partition_binomial_concentration():
    n = 256
    rng = np.random.default_rng(0)
    edges = set()
    while len(edges) < 10_000:
        u, v = rng.integers(0, n, size=2)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    g = sw.build_multiplex(n, [np.array(sorted(edges))])
    parts = sw.partition_edges(g, 4, 3)
    for p in parts:
        assert abs(p.shape[0] - 2500) <= 150


def test_edge_probability_clamps():
    p = edge_probability(np.array([0.5, 1.0, 2.0]), 1.0, 1.0, 2)
    assert p.tolist() == [1.0, 1.0, 0.25]


def test_calibrate_degenerate_points():
    from swrecon.errors import CalibrationError

    space = sw.TorusSpace(dim=1, side=4.0)
    pts = sw.PointSet(space=space, coords=np.zeros((3, 1)), density_bound=3)
    with pytest.raises(CalibrationError):
        sw.calibrate_normalizer(pts)
