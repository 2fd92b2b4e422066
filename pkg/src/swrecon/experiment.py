"""End-to-end experiment orchestration.

A single JSON-serializable config drives generation, optional stage
partitioning, pruning, category growth, refinement, and evaluation (or the
constant-degree pruning pipeline). Every random draw derives from the
config seed, so a rerun reproduces summary.json byte for byte; wall-clock
timings go to a separate file for that reason. Stage failures are recorded
by stage name and leave earlier artifacts in place.
"""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fileio
from .amoeba import (
    AmoebaParams,
    build_distance_labels,
    default_amoeba_params,
    run_amoeba_stage,
)
from .conditions import check_global_cd, check_lcd
from .edp import EdpParams, adaptive_edp, const_dr, edp_prune
from .errors import ConfigError, SwreconError
from .estimates import SpannerEstimate
from .evaluate import evaluate_categories, evaluate_distortion, stratified_pairs
from .generate import (
    LocalStructure,
    build_local_structure,
    build_multiplex,
    calibrate_normalizer,
    partition_edges,
    sample_single_category,
    SwgParams,
)
from .graphs import degrees, edges_to_csr, is_connected, pack_pairs
from .prune import (
    PruneParams,
    default_m2,
    local_radius,
    pruning_radius,
    simple_test,
)
from .torus import (
    CategoryEnsemble,
    TorusSpace,
    generate_points,
    pair_distances,
    permute_category,
)
from .twoball import (
    ExtParams,
    TwoBallParams,
    calibrate_dimconst,
    extended_two_ball,
    multi_recursive_two_ball,
    recursive_two_ball,
    two_ball_estimate,
)

SMALLWORLD_STAGES = ("generate", "partition", "prune", "amoeba", "refine", "evaluate")
EDP_STAGES = ("generate", "edp", "evaluate")


@dataclass
class ExperimentConfig:
    # generation
    n: int = 1024
    dim: int = 2
    categories: int = 1
    degree: float = 4.0
    jitter: float = 0.0
    norm_p: float = 2.0
    local: str = "none"  # "grid" | "none"
    seed: int = 0
    sampling: str = "auto"
    # pipeline
    pipeline: str = "smallworld"  # "smallworld" | "edp"
    stages: list = field(default_factory=lambda: list(SMALLWORLD_STAGES))
    stage_partition: bool = False
    num_stages: int = 2
    workers: int = 1
    # pruning constants
    theta_m2: float = 0.125
    theta_pr: float = 2.0
    m2_override: int | None = None
    # amoeba constants
    theta_am: float = 1.0
    theta_ar: float = 2.0
    seed_mode: str = "fast"
    amoeba_n_override: int | None = None
    amoeba_m_override: int | None = None
    diam_floor_override: float | None = None
    use_loose_prune: bool = True
    write_labels: bool = False
    # refinement
    refine: str = "none"  # "none" | "twoball" | "rec-twoball" | "ext-twoball"
    refine_pairs: int = 500
    pairs_file: str | None = None  # explicit pair list instead of sampling
    floor_override: float | None = None
    c_pd_override: float | None = None
    c_dim_override: float | None = None
    c_dim_trials: int = 20000
    c_dim_operating: bool = True
    r_scale: float | None = None
    expansion_bound: float = 4.0
    # evaluation
    eval_pairs: int = 2000
    delta_grid: list = field(default_factory=lambda: [0.0, 1.0, 2.0, 4.0, 8.0])
    check_conditions: bool = False
    condition_samples: int = 200
    lcd_r_max: float = 8.0
    lcd_bound_factor: float = 8.0
    # constant-degree pipeline
    edp_p: int = 3
    edp_h: int = 3
    edp_alpha: float = 1.0
    edp_c0: float = 4.0
    edp_adaptive: bool = False
    h_candidates: list = field(default_factory=lambda: [3, 5, 7])

    def validate(self):
        if self.n < 2:
            raise ConfigError("n must be >= 2")
        if self.dim < 1:
            raise ConfigError("dim must be >= 1")
        if not (1 <= self.categories <= 6):
            raise ConfigError("categories must be in 1..6")
        if self.degree <= 0:
            raise ConfigError("degree must be > 0")
        if not (0 <= self.jitter < 1):
            raise ConfigError("jitter must be in [0, 1)")
        if self.local not in ("none", "grid"):
            raise ConfigError(f"unknown local structure {self.local!r}")
        if self.pipeline not in ("smallworld", "edp"):
            raise ConfigError(f"unknown pipeline {self.pipeline!r}")
        if self.refine not in ("none", "twoball", "rec-twoball", "ext-twoball"):
            raise ConfigError(f"unknown refine mode {self.refine!r}")
        if self.seed_mode not in ("fast", "brute"):
            raise ConfigError(f"unknown seed mode {self.seed_mode!r}")
        if self.num_stages < 1 or self.workers < 1:
            raise ConfigError("num_stages and workers must be >= 1")
        allowed = SMALLWORLD_STAGES if self.pipeline == "smallworld" else EDP_STAGES
        for s in self.stages:
            if s not in allowed:
                raise ConfigError(f"stage {s!r} not valid for pipeline {self.pipeline}")
        side = round(self.n ** (1.0 / self.dim))
        if side ** self.dim != self.n:
            raise ConfigError("n must be a perfect dim-th power (cubic torus)")
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        return cfg.validate()


def _derived_seed(base: int, *salts: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([base, *salts]))


class ExperimentState:
    """Everything the stages hand to one another."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.ensemble: CategoryEnsemble | None = None
        self.permutations: list[np.ndarray] = []
        self.params: list[SwgParams] = []
        self.graph = None
        self.local_structure: LocalStructure | None = None
        self.stage_sets: list[np.ndarray] | None = None
        self.pruned = None
        self.pruned_loose = None
        self.amoeba_result = None
        self.amoeba_params: AmoebaParams | None = None
        self.refined: dict[int, dict] = {}
        self.edp_outcome = None

    @property
    def local_r(self) -> float:
        return local_radius(self.params[0].c_sw, self.config.degree, self.config.dim)

    @property
    def pruned_r(self) -> float:
        return pruning_radius(
            self.local_r, self.config.categories, self.config.dim, self.config.theta_pr
        )


def _stage_generate(state: ExperimentState, out: Path | None, summary: dict):
    cfg = state.config
    side = round(cfg.n ** (1.0 / cfg.dim))
    space = TorusSpace(dim=cfg.dim, side=float(side), norm_p=cfg.norm_p)
    categories, permutations = [], []
    for i in range(cfg.categories):
        pts = generate_points(space, cfg.n, cfg.jitter, _derived_seed(cfg.seed, 11, i))
        permuted, sigma = permute_category(pts, _derived_seed(cfg.seed, 13, i))
        categories.append(permuted)
        permutations.append(sigma)
    state.ensemble = CategoryEnsemble(categories=categories, permutations=permutations)
    state.permutations = permutations

    local = None
    if cfg.local == "grid":
        local = build_local_structure(categories[0], "toroidal_grid")
        state.local_structure = local

    edge_sets = []
    for i, pts in enumerate(categories):
        c_sw = calibrate_normalizer(pts)
        par = SwgParams(k=cfg.degree, c_sw=c_sw, dim=cfg.dim)
        state.params.append(par)
        edge_sets.append(
            sample_single_category(
                pts, par, _derived_seed(cfg.seed, 17, i), method=cfg.sampling
            )
        )
    state.graph = build_multiplex(cfg.n, edge_sets, local=local)
    summary["generate"] = {
        "n": cfg.n,
        "edges": int(state.graph.edges.shape[0]),
        "c_sw": [p.c_sw for p in state.params],
        "local_radius": state.local_r,
        "mean_degree": float(degrees(cfg.n, state.graph.edges).mean()),
    }
    if cfg.check_conditions and cfg.categories > 1:
        lcd = check_lcd(
            state.ensemble,
            cfg.lcd_r_max,
            cfg.lcd_bound_factor * math.log(cfg.n),
            cfg.condition_samples,
            _derived_seed(cfg.seed, 19),
        )
        gcd = check_global_cd(
            state.ensemble,
            cfg.n ** 0.25,
            cfg.condition_samples,
            _derived_seed(cfg.seed, 23),
        )
        summary["conditions"] = {
            "lcd_violations": len(lcd),
            "global_cd_violations": len(gcd),
        }
    if out is not None:
        for i, pts in enumerate(categories):
            fileio.write_positions(out / f"positions_cat{i}.csv", pts)
            fileio.write_permutation(out / f"permutation_cat{i}.csv", permutations[i])
        fileio.write_edge_list(out / "edges.txt", cfg.n, state.graph.edges)
        fileio.write_ground_truth(out / "ground_truth.txt", state.graph)


def _stage_partition(state: ExperimentState, out: Path | None, summary: dict):
    cfg = state.config
    if not cfg.stage_partition:
        summary["partition"] = {"enabled": False}
        return
    state.stage_sets = partition_edges(
        state.graph, cfg.num_stages, _derived_seed(cfg.seed, 29)
    )
    summary["partition"] = {
        "enabled": True,
        "stage_sizes": [int(s.shape[0]) for s in state.stage_sets],
    }
    if out is not None:
        for s, edges in enumerate(state.stage_sets):
            fileio.write_edge_list(out / f"stage_{s}.txt", cfg.n, edges)


def _prune_input_edges(state: ExperimentState) -> np.ndarray:
    if state.stage_sets is not None:
        return state.stage_sets[0]
    return state.graph.edges


def _growth_input_edges(state: ExperimentState) -> np.ndarray:
    if state.stage_sets is not None and len(state.stage_sets) > 1:
        return state.stage_sets[1]
    return state.graph.edges


def _stage_prune(state: ExperimentState, out: Path | None, summary: dict):
    cfg = state.config
    par = state.params[0]
    m2 = cfg.m2_override or default_m2(
        par.c_sw, cfg.degree, cfg.dim, cfg.categories, cfg.theta_m2
    )
    edges = _prune_input_edges(state)
    state.pruned = simple_test(edges, cfg.n, PruneParams(m2=m2), cfg.dim)
    info = {
        "m2": m2,
        "accepted_pairs": int(state.pruned.count),
        "local_radius": state.local_r,
        "pruning_radius": state.pruned_r,
    }
    if cfg.use_loose_prune and cfg.seed_mode == "fast":
        loose_factor = max(1.0, 3.0 * state.pruned_r / state.local_r)
        state.pruned_loose = simple_test(
            edges, cfg.n, PruneParams(m2=m2, loose_factor=loose_factor), cfg.dim
        )
        info["loose_pairs"] = int(state.pruned_loose.count)
    info.update(_prune_quality(state))
    summary["prune"] = info
    if out is not None:
        fileio.write_pruned_pairs(out / "pruned.txt", cfg.n, state.pruned.pairs, m2)


def _prune_quality(state: ExperimentState) -> dict:
    """Ground-truth acceptance/rejection rates for the pruned pair set."""
    cfg = state.config
    n = cfg.n
    ens = state.ensemble
    accepted = set(map(tuple, state.pruned.pairs))
    # Close pairs: min-category distance <= localR, enumerated per category.
    close = set()
    for pts in ens.categories:
        for u in range(n):
            d = pair_distances(
                pts.space, pts.coords, np.full(n - u - 1, u), np.arange(u + 1, n)
            )
            for v in np.flatnonzero(d <= state.local_r + 1e-12):
                close.add((u, u + 1 + int(v)))
    close_hit = sum(1 for pair in close if pair in accepted)
    # Far pairs: sampled, all-category distance >= prunedR.
    rng = _derived_seed(cfg.seed, 31)
    far_total, far_hit = 0, 0
    target = 20000
    while far_total < target:
        us = rng.integers(0, n, size=target)
        vs = rng.integers(0, n, size=target)
        keep = us < vs
        us, vs = us[keep], vs[keep]
        far_mask = np.ones(us.size, dtype=bool)
        for pts in ens.categories:
            far_mask &= (
                pair_distances(pts.space, pts.coords, us, vs) >= state.pruned_r
            )
        for u, v in zip(us[far_mask], vs[far_mask]):
            far_total += 1
            if (int(u), int(v)) in accepted:
                far_hit += 1
        if not np.any(far_mask):
            break
    return {
        "close_pairs": len(close),
        "close_accept_rate": close_hit / len(close) if close else 1.0,
        "far_sampled": far_total,
        "far_accept_rate": far_hit / far_total if far_total else 0.0,
    }


def _stage_amoeba(state: ExperimentState, out: Path | None, summary: dict):
    cfg = state.config
    params = default_amoeba_params(
        state.local_r,
        state.pruned_r,
        cfg.dim,
        cfg.categories,
        cfg.n,
        theta_am=cfg.theta_am,
        theta_ar=cfg.theta_ar,
        seed_mode=cfg.seed_mode,
        diam_floor=cfg.diam_floor_override,
    )
    if cfg.amoeba_n_override or cfg.amoeba_m_override:
        params = AmoebaParams(
            amoeba_n=cfg.amoeba_n_override or params.amoeba_n,
            amoeba_m=cfg.amoeba_m_override or params.amoeba_m,
            amoeba_r=params.amoeba_r,
            diam_floor=params.diam_floor,
            seed_mode=params.seed_mode,
        )
    state.amoeba_params = params
    loose = state.pruned_loose.pairs if state.pruned_loose is not None else None
    state.amoeba_result = run_amoeba_stage(
        cfg.n,
        _growth_input_edges(state),
        state.pruned.pairs,
        cfg.categories,
        params,
        pruned_loose=loose,
    )
    report = evaluate_categories(
        state.ensemble,
        state.pruned.pairs,
        state.amoeba_result.category_edges,
        state.local_r,
        params.amoeba_r,
    )
    summary["amoeba"] = {
        "amoeba_n": params.amoeba_n,
        "amoeba_m": params.amoeba_m,
        "amoeba_r": params.amoeba_r,
        "diam_floor": params.diam_floor,
        "category_sizes": [int(e.shape[0]) for e in state.amoeba_result.category_edges],
        "uncovered": int(state.amoeba_result.uncovered.shape[0]),
        "matching": report.matching,
        "recall": [s.recall for s in report.scores],
        "precision": [s.precision for s in report.scores],
        "contamination": [s.contamination for s in report.scores],
    }
    if out is not None:
        for i, e in enumerate(state.amoeba_result.category_edges):
            fileio.write_amoeba_edges(
                out / f"amoeba_cat{i}.txt", cfg.n, e, i, params.amoeba_r
            )
            if cfg.write_labels and e.shape[0]:
                labels = build_distance_labels(
                    e, cfg.n, _derived_seed(cfg.seed, 47, i)
                )
                fileio.write_labels(out / f"labels_cat{i}.csv", labels)


def _spanner_estimate_for(state: ExperimentState, category: int) -> SpannerEstimate:
    cfg = state.config
    edges = state.amoeba_result.category_edges[category]
    adj = edges_to_csr(cfg.n, edges)
    scale = state.amoeba_params.amoeba_r / state.local_r  # normalized hop length
    return SpannerEstimate(adj, scale)


def _stage_refine(state: ExperimentState, out: Path | None, summary: dict):
    cfg = state.config
    if cfg.refine == "none":
        summary["refine"] = {"mode": "none"}
        return
    union_adj = edges_to_csr(cfg.n, state.graph.edges)
    info = {"mode": cfg.refine, "categories": []}
    for i in range(cfg.categories):
        pts = state.ensemble.categories[i]
        normalizer = state.local_r
        if cfg.pairs_file is not None:
            pairs = fileio.read_pairs_file(cfg.pairs_file)
        else:
            pairs = stratified_pairs(
                pts, cfg.refine_pairs, _derived_seed(cfg.seed, 37, i)
            )
        initial = _spanner_estimate_for(state, i)
        pair_list = [(int(u), int(v)) for u, v in pairs]
        if cfg.refine == "twoball":
            values = {}
            fallbacks = 0
            for (u, v) in pair_list:
                try:
                    values[(u, v)] = two_ball_estimate(union_adj, initial, u, v, cfg.dim)
                except SwreconError:
                    values[(u, v)] = initial.value(u, v)
                    fallbacks += 1
            cat_info = {"fallbacks": fallbacks}
        else:
            tb = _twoball_params(state)
            if cfg.refine == "rec-twoball":
                est = multi_recursive_two_ball(
                    union_adj,
                    initial,
                    tb,
                    cfg.categories,
                    pair_list,
                    normalizer=normalizer,
                    expansion_bound=cfg.expansion_bound,
                )
            else:
                r_scale = cfg.r_scale or cfg.n ** 0.25
                est = extended_two_ball(
                    union_adj,
                    initial,
                    ExtParams(r_scale=r_scale, expansion_bound=cfg.expansion_bound),
                    cfg.dim,
                    pair_list,
                    normalizer=normalizer,
                )
            values = est.values
            cat_info = {"fallbacks": est.fallbacks, "unavailable": est.unavailable}
        true_norm = (
            pair_distances(pts.space, pts.coords, pairs[:, 0], pairs[:, 1]) / normalizer
        )
        est_vals = np.array([values[p] for p in pair_list])
        usable = np.isfinite(est_vals) & (true_norm > 0)
        if np.any(usable):
            report = evaluate_distortion(
                true_norm[usable], est_vals[usable], cfg.delta_grid
            )
            cat_info.update(
                {
                    "contraction": report.contraction,
                    "expansion_curve": report.expansion_curve,
                    "median_abs_error": float(
                        np.median(np.abs(est_vals[usable] - true_norm[usable]))
                    ),
                }
            )
        info["categories"].append(cat_info)
        state.refined[i] = values
        if out is not None:
            fileio.write_estimates(
                out / f"estimates_cat{i}.csv", values, normalizer, cfg.refine
            )
    summary["refine"] = info


def _twoball_params(state: ExperimentState) -> TwoBallParams:
    cfg = state.config
    c_pd = cfg.c_pd_override
    if c_pd is None:
        # Points per unit normalized ball: unit-ball volume times c_sw * k.
        vd = math.pi ** (cfg.dim / 2.0) / math.gamma(cfg.dim / 2.0 + 1.0)
        c_pd = vd * state.params[0].c_sw * cfg.degree
    c_dim = cfg.c_dim_override
    if c_dim is None and cfg.dim >= 3:
        fit = calibrate_dimconst(
            cfg.dim,
            c_pd,
            cfg.c_dim_trials,
            _derived_seed(cfg.seed, 41),
            disjointify=cfg.c_dim_operating,
        )
        c_dim = fit.c_dim
    elif c_dim is None:
        c_dim = 1.0
    floor = cfg.floor_override
    if floor is None:
        floor = 4.0 * math.log(cfg.n) ** 2
    return TwoBallParams(dim=cfg.dim, c_pd=c_pd, c_dim=c_dim, floor=floor)


def _stage_evaluate(state: ExperimentState, out: Path | None, summary: dict):
    cfg = state.config
    info = {}
    if state.amoeba_result is not None:
        union_pairs = state.pruned.pairs
        report = evaluate_categories(
            state.ensemble,
            union_pairs,
            state.amoeba_result.category_edges,
            state.local_r,
            state.amoeba_params.amoeba_r,
        )
        info["category_min_recall"] = report.min_recall
        info["category_contamination"] = report.total_contamination
    if state.amoeba_result is not None:
        # Spanner distortion per category over sampled pairs.
        per_cat = []
        for i in range(cfg.categories):
            pts = state.ensemble.categories[i]
            pairs = stratified_pairs(pts, cfg.eval_pairs, _derived_seed(cfg.seed, 43, i))
            est = _spanner_estimate_for(state, i)
            true_norm = (
                pair_distances(pts.space, pts.coords, pairs[:, 0], pairs[:, 1])
                / state.local_r
            )
            est_vals = np.array([est.value(int(u), int(v)) for u, v in pairs])
            usable = np.isfinite(est_vals) & (true_norm > 0)
            if np.any(usable):
                rep = evaluate_distortion(true_norm[usable], est_vals[usable], cfg.delta_grid)
                per_cat.append(
                    {
                        "contraction": rep.contraction,
                        "expansion_at_0": rep.expansion_at(0.0),
                        "pairs": rep.n_pairs,
                        "unreachable": int(np.count_nonzero(~np.isfinite(est_vals))),
                    }
                )
                if out is not None:
                    _write_distortion_csv(out / f"distortion_cat{i}.csv", rep)
            else:
                per_cat.append({"pairs": 0})
        info["spanner_distortion"] = per_cat
    summary["evaluate"] = info


def _write_distortion_csv(path: Path, report):
    lines = ["metric,key,value"]
    lines.append(f"contraction,,{report.contraction!r}")
    for delta, chat in report.expansion_curve:
        lines.append(f"expansion,delta={delta!r},{chat!r}")
    for b in report.bucket_errors:
        key = f"true=[{b['true_lo']!r};{b['true_hi']!r}]"
        lines.append(f"bucket_q50,{key},{b['q50']!r}")
        lines.append(f"bucket_q90,{key},{b['q90']!r}")
    path.write_text("\n".join(lines) + "\n")


def _stage_edp(state: ExperimentState, out: Path | None, summary: dict):
    cfg = state.config
    n, edges = state.graph.union_view()
    base = EdpParams(p=cfg.edp_p, h=cfg.edp_h, alpha=cfg.edp_alpha)
    if cfg.edp_adaptive:
        p, h, pruned = adaptive_edp(
            n, edges, list(cfg.h_candidates), base.alpha, cfg.dim, cfg.degree, cfg.edp_c0
        )
    else:
        p, h = base.p, base.h
        pruned = edp_prune(n, edges, p, h)
    threshold = const_dr(base.alpha, p, h, n, cfg.dim, cfg.degree, cfg.edp_c0)
    state.edp_outcome = (p, h, pruned)
    pts = state.ensemble.categories[0]
    lengths = pair_distances(pts.space, pts.coords, pruned[:, 0], pruned[:, 1])
    info = {
        "p": p,
        "h": h,
        "const_dr": threshold,
        "input_edges": int(edges.shape[0]),
        "kept_edges": int(pruned.shape[0]),
        "connected": is_connected(n, pruned),
        "edges_above_const_dr": int(np.count_nonzero(lengths > threshold)),
    }
    if state.local_structure is not None:
        grid_keys = pack_pairs(state.local_structure.edges, n)
        kept_keys = pack_pairs(pruned, n)
        info["grid_retained"] = bool(np.isin(grid_keys, kept_keys).all())
    summary["edp"] = info
    if out is not None:
        fileio.write_edp_edges(out / "edp_pruned.txt", n, pruned, p, h, threshold)


_STAGE_FUNCS = {
    "generate": _stage_generate,
    "partition": _stage_partition,
    "prune": _stage_prune,
    "amoeba": _stage_amoeba,
    "refine": _stage_refine,
    "evaluate": _stage_evaluate,
    "edp": _stage_edp,
}


def run_experiment(config: ExperimentConfig, out_dir=None) -> dict:
    """Execute the configured pipeline; returns the summary dict.

    With ``out_dir`` set, artifacts and summary.json are written there.
    The summary contains no wall-clock data; timings.txt does.
    """
    config.validate()
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    state = ExperimentState(config)
    summary: dict = {"config": config.to_dict(), "stages": {}}
    timings = []
    for stage in config.stages:
        fn = _STAGE_FUNCS[stage]
        start = time.perf_counter()
        try:
            fn(state, out, summary)
        except Exception as exc:  # noqa: BLE001 - recorded, then halted
            summary["stages"][stage] = f"error: {type(exc).__name__}: {exc}"
            break
        finally:
            timings.append((stage, time.perf_counter() - start))
        summary["stages"][stage] = "ok"
    if out is not None:
        fileio.write_summary(out / "summary.json", summary)
        with open(out / "timings.txt", "w") as fh:
            for stage, dt in timings:
                fh.write(f"{stage} {dt:.3f}s\n")
    return summary


def run_sweep(
    base: ExperimentConfig, grid: dict[str, list], out_dir=None
) -> list[dict]:
    """Run the pipeline over a cartesian parameter grid.

    Returns one record per combination with the headline prune/amoeba
    metrics, sorted by the grid order. A combination that fails mid-stage
    contributes its error string instead.
    """
    import itertools as it

    keys = sorted(grid)
    records = []
    for combo in it.product(*(grid[k] for k in keys)):
        overrides = dict(zip(keys, combo))
        cfg = ExperimentConfig.from_dict({**base.to_dict(), **overrides})
        sub = None
        if out_dir is not None:
            tag = "_".join(f"{k}={v}" for k, v in overrides.items())
            sub = Path(out_dir) / tag
        summary = run_experiment(cfg, sub)
        rec = {"overrides": overrides}
        rec["stages"] = summary["stages"]
        for section in ("prune", "amoeba", "edp"):
            if section in summary:
                rec[section] = summary[section]
        records.append(rec)
    return records
