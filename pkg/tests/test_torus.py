"""Metric-space core: distances, balls, generation, nets, permutations."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import swrecon as sw
from swrecon.errors import InvalidInputError


@pytest.fixture(scope="module")
def grid8():
    space = sw.TorusSpace(dim=2, side=8.0)
    return sw.generate_points(space, 64, 0.0, 0)


def test_wraparound_distance():
    space = sw.TorusSpace(dim=2, side=8.0)
    assert sw.torus_distance(space, (0, 0), (7, 0)) == pytest.approx(1.0)


def test_plane_distance_345():
    space = sw.TorusSpace(dim=2, side=100.0)
    assert sw.torus_distance(space, (0, 0), (3, 4)) == pytest.approx(5.0)


def test_identical_points():
    space = sw.TorusSpace(dim=3, side=10.0)
    assert sw.torus_distance(space, (1, 2, 3), (1, 2, 3)) == 0.0


def test_dimension_mismatch():
    space = sw.TorusSpace(dim=2, side=8.0)
    with pytest.raises(InvalidInputError):
        sw.torus_distance(space, (0, 0, 0), (1, 1))


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(0, 7.999), min_size=6, max_size=6),
    st.sampled_from([1.0, 2.0, 3.0]),
)
def test_metric_axioms(coords, p):
    space = sw.TorusSpace(dim=2, side=8.0, norm_p=p)
    a, b, c = np.array(coords).reshape(3, 2)
    dab = sw.torus_distance(space, a, b)
    dba = sw.torus_distance(space, b, a)
    dac = sw.torus_distance(space, a, c)
    dcb = sw.torus_distance(space, c, b)
    assert dab == pytest.approx(dba)
    assert dab <= dac + dcb + 1e-9


def test_triangle_inequality_bulk():
    # Large single-shot sample complements the hypothesis cases.
    space = sw.TorusSpace(dim=3, side=16.0)
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 16, size=(3, 100_000, 3))
    from swrecon.torus import _wrap_deltas

    def dist(x, y):
        d = _wrap_deltas(space, x - y)
        return np.sqrt((d ** 2).sum(axis=1))

    ab = dist(pts[0], pts[1])
    ac = dist(pts[0], pts[2])
    cb = dist(pts[2], pts[1])
    assert np.all(ab <= ac + cb + 1e-9)


def test_ball_zero_radius(grid8):
    assert list(sw.ball(grid8, 5, 0.0)) == [5]


def test_ball_unit_radius_grid(grid8):
    members = sw.ball(grid8, 0, 1.0)
    assert len(members) == 5  # center plus 4 wrap-adjacent neighbors
    assert 0 in members


def test_ball_full_radius(grid8):
    members = sw.ball(grid8, 3, grid8.space.diameter + 1)
    assert len(members) == 64


def test_ball_monotone(grid8):
    rng = np.random.default_rng(1)
    for _ in range(20):
        u = int(rng.integers(64))
        r1, r2 = sorted(rng.uniform(0, 6, size=2))
        small = set(sw.ball(grid8, u, r1).tolist())
        big = set(sw.ball(grid8, u, r2).tolist())
        assert small <= big


def test_generate_exact_grid():
    space = sw.TorusSpace(dim=2, side=16.0)
    pts = sw.generate_points(space, 256, 0.0, 3)
    assert sw.check_density(pts) == (1, 1)
    assert pts.is_lattice()


def test_generate_jitter_density():
    space = sw.TorusSpace(dim=2, side=64.0)
    pts = sw.generate_points(space, 4096, 0.4, 7)
    lo, hi = sw.check_density(pts)
    assert lo >= 1
    assert hi <= 4  # 2^dim bound from the cell construction


def test_generate_deterministic():
    space = sw.TorusSpace(dim=2, side=8.0)
    a = sw.generate_points(space, 64, 0.3, 11)
    b = sw.generate_points(space, 64, 0.3, 11)
    assert np.array_equal(a.coords, b.coords)


def test_generate_lattice_too_small():
    space = sw.TorusSpace(dim=2, side=4.0)
    with pytest.raises(InvalidInputError):
        sw.generate_points(space, 17, 0.0, 0)


def test_permute_identity(grid8):
    permuted, sigma = sw.permute_category(grid8, None)
    assert np.array_equal(sigma, np.arange(64))
    assert np.array_equal(permuted.coords, grid8.coords)


def test_permute_multiset_and_inverse(grid8):
    permuted, sigma = sw.permute_category(grid8, 5)
    orig = {tuple(row) for row in grid8.coords}
    new = {tuple(row) for row in permuted.coords}
    assert orig == new
    inv = np.argsort(sigma)
    # sigma composed with its inverse restores the original labeling.
    assert np.array_equal(permuted.coords[inv], grid8.coords)
    assert np.array_equal(sigma[inv], np.arange(64))


def test_epsilon_net_tiny_radius(grid8):
    net = sw.epsilon_net(grid8, 0.5)
    assert len(net) == 64


def test_epsilon_net_huge_radius(grid8):
    net = sw.epsilon_net(grid8, grid8.space.diameter + 1)
    assert len(net) == 1


def test_epsilon_net_l1_grid():
    space = sw.TorusSpace(dim=2, side=8.0, norm_p=1.0)
    pts = sw.generate_points(space, 64, 0.0, 0)
    net = sw.epsilon_net(pts, 2.0)
    # Packing: no ball of radius 1 holds two net nodes -> at most 64/5;
    # covering: each net node covers at most 13 nodes -> at least 64/13.
    assert 64 / 13 <= len(net) <= 64 / 5
    from swrecon.torus import distances_from

    coords = pts.coords
    for i, u in enumerate(net):
        d = distances_from(space, coords[u], coords[net])
        d[i] = np.inf
        assert d.min() >= 2.0 - 1e-9
    covered = np.zeros(64, dtype=bool)
    for u in net:
        covered |= distances_from(space, coords[u], coords) <= 2.0 + 1e-9
    assert covered.all()


def test_knn_trivial(grid8):
    est = sw.MetricEstimate(grid8)
    assert list(sw.knn_ball(est, 9, 1)) == [9]
    assert len(sw.knn_ball(est, 9, 64)) == 64


def test_knn_tie_break():
    # est(u, .) = (0, 2, 2, 3): the oracle sorts by (value, id).
    mat = np.array(
        [[0, 2, 2, 3], [2, 0, 1, 1], [2, 1, 0, 1], [3, 1, 1, 0]], dtype=float
    )
    est = sw.DenseEstimate(mat)
    expected = [i for _, i in sorted((v, i) for i, v in enumerate(mat[0]))][:2]
    assert sorted(expected) == sorted(sw.knn_ball(est, 0, 2).tolist())
    assert set(sw.knn_ball(est, 0, 2).tolist()) == {0, 1}


def test_knn_deterministic(grid8):
    est = sw.MetricEstimate(grid8)
    first = sw.knn_ball(est, 17, 9)
    for _ in range(5):
        assert np.array_equal(first, sw.knn_ball(est, 17, 9))


def test_knn_kappa_range(grid8):
    est = sw.MetricEstimate(grid8)
    with pytest.raises(InvalidInputError):
        sw.knn_ball(est, 0, 0)
    with pytest.raises(InvalidInputError):
        sw.knn_ball(est, 0, 65)
