"""Lifted and super-lifted Euler characteristic transforms of
piecewise-linear scalar fields, with distances, alignment, moduli checks,
finite Euler-calculus operations, simulation generators and a kernel
classifier pipeline."""

from .field_core import (
    DirectionSet,
    EulerCurve,
    PLField,
    TransformGrid,
    VoxelGrid,
    default_heights,
    default_thresholds,
    load_field,
    make_directions,
    normalize_field,
    pl_from_grid_2d,
    voxel_to_pl,
    write_field,
)
from .complex_ops import (
    ClippedComplex,
    euler_characteristic,
    euler_integral,
    halfspace_clip,
    level_restrict,
    superlevel_restrict,
)
from .transforms import ScanRequest, ect_curve, ect_transform, euler_scan, lect_transform, select_transform
from .analysis import (
    align_2d,
    marginal_curves,
    rotate_field,
    select_distance,
    select_grid_of_weighted,
    shift_directions,
    weighted_euler_curve,
)
from .moduli import ModuliParams, check_gap_condition, check_observability, delta_bound, max_jump_count, verify_class
from .generators import QuadricSpec, gen_field_suite, gen_glyph_field_2d, gen_point_cloud_field, gen_quadric
from .stats import (
    DistanceMatrix,
    auc,
    classical_mds,
    cut_dendrogram,
    delong_ci,
    hierarchical_cluster,
    median_bandwidth,
    split_train_test,
    svm_decision,
    svm_train,
)

__version__ = "0.1.0"
