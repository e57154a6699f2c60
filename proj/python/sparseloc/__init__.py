"""Target localization in sparse point clouds by box filtering and PCA."""

from ._sparseloc import (
    CameraRig,
    SparselocError,
    char_poly_roots3,
    default_scene_json,
    estimate_pose,
    filter_in_box,
    gen_target_cloud,
    normalize_box,
    project_cloud,
    projection_matrix,
    run_locate,
    svd_right3,
    sym_eigen3,
)

__all__ = [
    "CameraRig",
    "SparselocError",
    "char_poly_roots3",
    "default_scene_json",
    "estimate_pose",
    "filter_in_box",
    "gen_target_cloud",
    "normalize_box",
    "project_cloud",
    "projection_matrix",
    "run_locate",
    "svd_right3",
    "sym_eigen3",
]
