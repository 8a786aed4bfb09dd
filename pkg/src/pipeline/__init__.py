"""Routing, Model Grid and Pipeline Package"""

from src.pipeline.routing import RoutingConfig, route, is_high_score, fold_splits
from src.pipeline.ensemble import (
    ModelGrid,
    PART_A,
    PART_B,
    PART_CONCAT,
    CONCAT_BASELINES,
    cell_name,
    derive_seed,
    modality_feature,
    concat_feature,
    feature_dims,
    ensemble_probs,
    ensemble_batch,
    mean_of_sorted,
    train_part_a,
    train_part_b,
    train_concat,
    train_grid,
)
from src.pipeline.runner import (
    Predictions,
    FusionOutcome,
    FusionPipeline,
    PART_A_MODEL,
    single_model,
    concat_model,
    label_lists,
    as_retrieval,
    fuse_predictions,
    run_pipeline,
)

__all__ = [
    "RoutingConfig",
    "route",
    "is_high_score",
    "fold_splits",
    "ModelGrid",
    "PART_A",
    "PART_B",
    "PART_CONCAT",
    "CONCAT_BASELINES",
    "cell_name",
    "derive_seed",
    "modality_feature",
    "concat_feature",
    "feature_dims",
    "ensemble_probs",
    "ensemble_batch",
    "mean_of_sorted",
    "train_part_a",
    "train_part_b",
    "train_concat",
    "train_grid",
    "Predictions",
    "FusionOutcome",
    "FusionPipeline",
    "PART_A_MODEL",
    "single_model",
    "concat_model",
    "label_lists",
    "as_retrieval",
    "fuse_predictions",
    "run_pipeline",
]
