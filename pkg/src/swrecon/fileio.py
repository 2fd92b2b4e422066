"""On-disk formats: positions, permutations, edge lists, estimates, labels.

Edge-list files carry a ``# n=<n>`` header line and one ``u v`` pair per
line with u < v in ascending lexicographic order; stage-specific writers
extend the header with their parameters. All floats are written with
repr-level precision so rereads round-trip.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .generate import MultiplexGraph
from .graphs import canonical_edges
from .torus import PointSet, TorusSpace


def write_positions(path, points: PointSet):
    dim = points.space.dim
    header = "node," + ",".join(f"x{i + 1}" for i in range(dim))
    lines = [header]
    for i, row in enumerate(points.coords):
        lines.append(f"{i}," + ",".join(repr(float(c)) for c in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_positions(path, side: float, norm_p: float = 2.0, density_bound: int = 4) -> PointSet:
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    if header[0] != "node":
        raise InvalidInputError(f"bad positions header in {path}")
    dim = len(header) - 1
    coords = np.array(
        [[float(x) for x in line.split(",")[1:]] for line in lines[1:]], dtype=np.float64
    )
    space = TorusSpace(dim=dim, side=side, norm_p=norm_p)
    return PointSet(space=space, coords=coords, density_bound=density_bound)


def write_permutation(path, sigma: np.ndarray):
    lines = ["node,image"] + [f"{i},{int(s)}" for i, s in enumerate(sigma)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_permutation(path) -> np.ndarray:
    lines = Path(path).read_text().strip().splitlines()
    if lines[0] != "node,image":
        raise InvalidInputError(f"bad permutation header in {path}")
    pairs = [tuple(map(int, line.split(","))) for line in lines[1:]]
    sigma = np.empty(len(pairs), dtype=np.int64)
    for node, image in pairs:
        sigma[node] = image
    return sigma


def write_edge_list(path, n: int, edges: np.ndarray, header_extra: str = ""):
    edges = canonical_edges(edges)
    head = f"# n={n}" + (f" {header_extra}" if header_extra else "")
    lines = [head] + [f"{u} {v}" for u, v in edges]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path) -> tuple[int, np.ndarray, str]:
    lines = Path(path).read_text().strip().splitlines()
    head = lines[0]
    if not head.startswith("# n="):
        raise InvalidInputError(f"bad edge-list header in {path}")
    fields = head[2:].split()
    n = int(fields[0].split("=")[1])
    extra = " ".join(fields[1:])
    if len(lines) > 1:
        edges = np.array([list(map(int, l.split())) for l in lines[1:]], dtype=np.int64)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return n, edges, extra


def write_ground_truth(path, graph: MultiplexGraph):
    """Sidecar: ``u v cat1[,cat2,...]`` with ``local`` appended as a tag."""
    lines = []
    for (u, v), origins in zip(graph.edges, graph.origin_sets()):
        tags = ",".join(str(o) for o in origins)
        lines.append(f"{u} {v} {tags}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_ground_truth(path, n: int, num_categories: int) -> MultiplexGraph:
    lines = Path(path).read_text().strip().splitlines()
    edges, masks, local = [], [], []
    for line in lines:
        u, v, tags = line.split()
        edges.append((int(u), int(v)))
        row = np.zeros(num_categories, dtype=bool)
        is_local = False
        for tag in tags.split(","):
            if tag == "local":
                is_local = True
            else:
                row[int(tag)] = True
        masks.append(row)
        local.append(is_local)
    return MultiplexGraph(
        n=n,
        edges=np.asarray(edges, dtype=np.int64),
        origin_mask=np.asarray(masks, dtype=bool),
        local=np.asarray(local, dtype=bool),
    )


def write_pruned_pairs(path, n: int, pairs: np.ndarray, m2: int):
    write_edge_list(path, n, pairs, header_extra=f"pruned m2={m2}")


def write_amoeba_edges(path, n: int, edges: np.ndarray, category: int, amoeba_r: float):
    write_edge_list(
        path, n, edges, header_extra=f"amoeba cat={category} amoebaR={amoeba_r!r}"
    )


def write_edp_edges(path, n: int, edges: np.ndarray, p: int, h: int, constdr: float):
    write_edge_list(path, n, edges, header_extra=f"edp p={p} h={h} constdr={constdr!r}")


def write_estimates(path, values: dict, normalizer: float, algorithm: str):
    """Upper-triangle ``u,v,value`` rows under an algorithm/normalizer header."""
    lines = [f"# algorithm={algorithm} normalizer={normalizer!r}", "u,v,value"]
    for (u, v) in sorted(values):
        lines.append(f"{u},{v},{values[(u, v)]!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_estimates(path) -> tuple[dict, float, str]:
    lines = Path(path).read_text().strip().splitlines()
    head = lines[0]
    if not head.startswith("# algorithm="):
        raise InvalidInputError(f"bad estimates header in {path}")
    fields = dict(part.split("=", 1) for part in head[2:].split())
    values = {}
    for line in lines[2:]:
        u, v, val = line.split(",")
        values[(int(u), int(v))] = float(val)
    return values, float(fields["normalizer"]), fields["algorithm"]


def write_labels(path, labels):
    lines = ["node,beacon,scale,hops"]
    for node, beacon, scale, hops in labels.records:
        lines.append(f"{node},{beacon},{scale!r},{hops}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_pairs_file(path, pairs: np.ndarray):
    lines = [f"{u} {v}" for u, v in pairs]
    Path(path).write_text("\n".join(lines) + "\n")


def read_pairs_file(path) -> np.ndarray:
    lines = Path(path).read_text().strip().splitlines()
    return np.array([list(map(int, l.split())) for l in lines], dtype=np.int64)


def write_summary(path, summary: dict):
    """Deterministic JSON: sorted keys, explicit separators, trailing newline."""
    Path(path).write_text(
        json.dumps(summary, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"
    )
