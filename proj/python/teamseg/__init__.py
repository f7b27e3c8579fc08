"""Appearance model estimation from co-occurrence moments and graph-cut segmentation."""

from ._core import (
    FormatError,
    RankDeficientError,
    bhattacharyya,
    estimate,
    generate,
    load_graymap,
    make_mask,
    mean_jaccard,
    model_set_distance,
    models_from_gt,
    moments,
    project_simplex,
    save_graymap,
    segment,
)

__all__ = [
    "FormatError",
    "RankDeficientError",
    "bhattacharyya",
    "estimate",
    "generate",
    "load_graymap",
    "make_mask",
    "mean_jaccard",
    "model_set_distance",
    "models_from_gt",
    "moments",
    "project_simplex",
    "save_graymap",
    "segment",
]
