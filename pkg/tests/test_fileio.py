"""Round trips for every on-disk format."""

import numpy as np
import pytest

import swrecon as sw
from swrecon import fileio
from swrecon.errors import InvalidInputError


def test_positions_round_trip(tmp_path):
    space = sw.TorusSpace(dim=2, side=8.0)
    pts = sw.generate_points(space, 64, 0.35, 3)
    path = tmp_path / "pos.csv"
    fileio.write_positions(path, pts)
    back = fileio.read_positions(path, side=8.0)
    assert np.array_equal(back.coords, pts.coords)
    head = path.read_text().splitlines()[0]
    assert head == "node,x1,x2"


def test_permutation_round_trip(tmp_path):
    sigma = np.random.default_rng(0).permutation(50)
    path = tmp_path / "perm.csv"
    fileio.write_permutation(path, sigma)
    assert np.array_equal(fileio.read_permutation(path), sigma)


def test_edge_list_round_trip(tmp_path):
    edges = np.array([[3, 5], [0, 1], [2, 7]])
    path = tmp_path / "edges.txt"
    fileio.write_edge_list(path, 8, edges, header_extra="pruned m2=4")
    n, back, extra = fileio.read_edge_list(path)
    assert n == 8
    assert extra == "pruned m2=4"
    assert back.tolist() == [[0, 1], [2, 7], [3, 5]]  # ascending lex order


def test_edge_list_bad_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 1\n")
    with pytest.raises(InvalidInputError):
        fileio.read_edge_list(path)


def test_ground_truth_round_trip(tmp_path):
    edges = np.array([[0, 1], [1, 2], [2, 3]])
    local = sw.LocalStructure(edges=np.array([[2, 3]]), kind="custom")
    g = sw.build_multiplex(4, [edges[:2], edges[1:2]], local=local)
    path = tmp_path / "gt.txt"
    fileio.write_ground_truth(path, g)
    back = fileio.read_ground_truth(path, 4, 2)
    assert np.array_equal(back.edges, g.edges)
    assert np.array_equal(back.origin_mask, g.origin_mask)
    assert np.array_equal(back.local, g.local)


def test_estimates_round_trip(tmp_path):
    values = {(0, 3): 1.25, (1, 2): 7.5}
    path = tmp_path / "est.csv"
    fileio.write_estimates(path, values, normalizer=2.5, algorithm="twoball")
    back, normalizer, algorithm = fileio.read_estimates(path)
    assert back == values
    assert normalizer == 2.5
    assert algorithm == "twoball"


def test_labels_file(tmp_path):
    labels = sw.DistanceLabels(
        scales=[1.0, 2.0],
        tables=[{1: 2}, {1: 0}],
        records=[(0, 1, 1.0, 2), (1, 1, 1.0, 0)],
    )
    path = tmp_path / "labels.csv"
    fileio.write_labels(path, labels)
    lines = path.read_text().splitlines()
    assert lines[0] == "node,beacon,scale,hops"
    assert len(lines) == 3


def test_pairs_file_round_trip(tmp_path):
    pairs = np.array([[0, 5], [2, 3]])
    path = tmp_path / "pairs.txt"
    fileio.write_pairs_file(path, pairs)
    assert np.array_equal(fileio.read_pairs_file(path), pairs)


def test_summary_deterministic_bytes(tmp_path):
    payload = {"b": 1.5, "a": [1, 2, {"z": "x"}]}
    p1, p2 = tmp_path / "s1.json", tmp_path / "s2.json"
    fileio.write_summary(p1, payload)
    fileio.write_summary(p2, payload)
    assert p1.read_bytes() == p2.read_bytes()
