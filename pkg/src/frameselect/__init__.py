"""Reference-guided frame selection for interactive segmentation workflows.

The package scores video frames against a clinician-chosen reference frame
using five unsupervised features (brightness, contrast, edge density, color
similarity, shape similarity), clusters the composite scores, and surfaces
one representative frame per cluster plus a proximity ranking of the rest.
Companion modules derive point/box prompts from masks, evaluate predicted
masks, and expose the pipeline through a CLI and a small HTTP service.
"""

from .dataset import (
    Dataset,
    DatasetError,
    FrameRecord,
    FrameScoreRow,
    SelectionManifest,
    export_scores_csv,
    ingest,
    load_manifest,
    manifest_from_afse,
    manifest_from_membership,
    save_manifest,
    split_dataset,
    split_ids,
)
from .features import (
    FeatureError,
    FeatureParams,
    FeatureVector,
    ReferenceProfile,
    brightness,
    build_reference_profile,
    canny,
    contrast,
    edge_density,
    extract_features,
    hist_correlation,
    hsv_histogram,
    hu_moments,
    shape_similarity,
)
from .metrics import (
    EvalReport,
    FrameScore,
    MetricsError,
    dice_coefficient,
    evaluate_masks,
    iou_score,
)
from .prompts import (
    PROMPT_STRATEGIES,
    PromptError,
    PromptPoint,
    PromptSpec,
    derive_bbox,
    derive_prompts,
    largest_component,
    sample_points,
    standard_pos_point,
)
from .raster import RasterError, load_image, load_mask, save_image, save_mask, to_grayscale, to_hsv
from .rng import SplitMix64
from .selection import (
    SELECTION_STRATEGIES,
    AfseResult,
    ClusterModel,
    ScoreSet,
    SelectionError,
    SelectionResult,
    WeightConfig,
    composite_score,
    kmeans_fit,
    run_afse,
    run_afse_without_scorer,
    select_afse_wo_scorer,
    select_random,
    select_representatives,
    select_uniform,
)

__version__ = "0.1.0"

__all__ = [
    "AfseResult",
    "ClusterModel",
    "Dataset",
    "DatasetError",
    "EvalReport",
    "FeatureError",
    "FeatureParams",
    "FeatureVector",
    "FrameRecord",
    "FrameScore",
    "FrameScoreRow",
    "MetricsError",
    "PROMPT_STRATEGIES",
    "PromptError",
    "PromptPoint",
    "PromptSpec",
    "RasterError",
    "ReferenceProfile",
    "SELECTION_STRATEGIES",
    "ScoreSet",
    "SelectionError",
    "SelectionManifest",
    "SelectionResult",
    "SplitMix64",
    "WeightConfig",
    "brightness",
    "build_reference_profile",
    "canny",
    "composite_score",
    "contrast",
    "derive_bbox",
    "derive_prompts",
    "dice_coefficient",
    "edge_density",
    "evaluate_masks",
    "export_scores_csv",
    "extract_features",
    "hist_correlation",
    "hsv_histogram",
    "hu_moments",
    "ingest",
    "iou_score",
    "kmeans_fit",
    "largest_component",
    "load_image",
    "load_manifest",
    "load_mask",
    "manifest_from_afse",
    "manifest_from_membership",
    "run_afse",
    "run_afse_without_scorer",
    "sample_points",
    "save_image",
    "save_manifest",
    "save_mask",
    "select_afse_wo_scorer",
    "select_random",
    "select_representatives",
    "select_uniform",
    "shape_similarity",
    "split_dataset",
    "split_ids",
    "standard_pos_point",
    "to_grayscale",
    "to_hsv",
    "__version__",
]
