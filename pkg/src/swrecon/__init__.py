"""Multiplex small-world graphs over hidden toroidal metrics, and the
reconstruction of those metrics from the unlabeled union of edges."""

from .torus import (
    TorusSpace,
    PointSet,
    CategoryEnsemble,
    torus_distance,
    ball,
    generate_points,
    permute_category,
    epsilon_net,
    check_density,
)
from .estimates import (
    DistanceEstimate,
    DenseEstimate,
    MetricEstimate,
    SpannerEstimate,
    OverlayEstimate,
    knn_ball,
)
from .conditions import (
    CdViolation,
    check_lcd,
    check_global_cd,
    permutation_chernoff_check,
)
from .generate import (
    SwgParams,
    MultiplexGraph,
    LocalStructure,
    calibrate_normalizer,
    sample_single_category,
    build_multiplex,
    build_local_structure,
    partition_edges,
    edge_probability,
)
from .prune import (
    PruneParams,
    PrunedPairs,
    count_common_neighbors,
    simple_test,
    simple_test_on_edges,
    default_m2,
    local_radius,
    pruning_radius,
)
from .amoeba import (
    AmoebaParams,
    AmoebaResult,
    DistanceLabels,
    amoeba_test,
    find_seed_clique_brute,
    find_seed_clique_fast,
    grow_amoeba,
    run_amoeba_stage,
    spanner_distance,
    build_distance_labels,
    label_query,
    default_amoeba_params,
)
from .twoball import (
    TwoBallParams,
    ExtParams,
    NormalizedEstimate,
    two_ball_estimate,
    calibrate_dimconst,
    recursive_two_ball,
    extended_two_ball,
    multi_recursive_two_ball,
    hat_scale,
)
from .edp import (
    EdpParams,
    RichnessReport,
    has_p_disjoint_bounded_paths,
    edp_prune,
    const_dr,
    check_richness,
    adaptive_edp,
)
from .evaluate import (
    DistortionReport,
    CategoryReport,
    evaluate_distortion,
    evaluate_categories,
    stratified_pairs,
)
from .experiment import ExperimentConfig, run_experiment, run_sweep
from . import errors

__version__ = "0.1.0"
