from .evaluate import EvalTriple, evaluate, held_out_triples, pooled_features, score_triples
from .metrics import (
    SegmentationScores,
    center_box,
    confusion_matrix,
    crop,
    fid,
    frechet_distance,
    gaussian_fit,
    label_endpoint_error,
    mask_centroid,
    mask_iou,
    patch_style_distance,
    segmentation_scores,
)
from .report import MetricReport

__all__ = [
    "EvalTriple",
    "MetricReport",
    "SegmentationScores",
    "center_box",
    "confusion_matrix",
    "crop",
    "evaluate",
    "fid",
    "frechet_distance",
    "gaussian_fit",
    "held_out_triples",
    "label_endpoint_error",
    "mask_centroid",
    "mask_iou",
    "patch_style_distance",
    "pooled_features",
    "score_triples",
    "segmentation_scores",
]
