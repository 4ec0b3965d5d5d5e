"""Pure metric functions.

Every function here is deterministic: reductions run in float64 in a fixed
order, so the same inputs always give the same report.
"""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple, Union

import numpy as np
import torch
from scipy import linalg

from exemplar_synth.exceptions import MetricError

if TYPE_CHECKING:
    from exemplar_synth.losses.perceptual import PerceptualExtractor
    from exemplar_synth.types import Image, LabelMap
    from exemplar_synth.utils.typing import Size2D

ArrayLike = Union[np.ndarray, torch.Tensor, Sequence[Sequence[float]]]

#: (top, left, height, width) in pixels.
Box = Tuple[int, int, int, int]

#: Eigenvalues below this are treated as zero in the matrix square root.
EIGENVALUE_FLOOR = 1e-12


def _as_float64(values: ArrayLike) -> np.ndarray:
    if isinstance(values, torch.Tensor):
        values = values.detach().cpu().numpy()
    return np.asarray(values, dtype=np.float64)


def _sqrt_psd(matrix: np.ndarray) -> np.ndarray:
    """Symmetric square root of a positive semi-definite matrix."""
    eigenvalues, eigenvectors = linalg.eigh(matrix)
    roots = np.sqrt(np.where(eigenvalues < EIGENVALUE_FLOOR, 0.0, eigenvalues))
    return (eigenvectors * roots) @ eigenvectors.T


def gaussian_fit(features: ArrayLike, name: str = "features") -> Tuple[np.ndarray, np.ndarray]:
    features = _as_float64(features)
    if features.ndim != 2:
        raise MetricError(f"{name} must be a 2D array of N×D vectors, got shape {features.shape}")

    n, dim = features.shape
    if n < dim + 1:
        raise MetricError(
            f"{name}: FID on {dim}-dimensional features needs at least {dim + 1} vectors, got {n}",
            suggestion="Evaluate more triples or tap a shallower layer",
        )

    return features.mean(axis=0), np.cov(features, rowvar=False).reshape(dim, dim)


def frechet_distance(
    mu_a: np.ndarray,
    sigma_a: np.ndarray,
    mu_b: np.ndarray,
    sigma_b: np.ndarray,
) -> float:
    """Fréchet distance between N(mu_a, sigma_a) and N(mu_b, sigma_b).

    Tr((Σa Σb)^½) is computed as Tr((√Σa Σb √Σa)^½), which only needs
    symmetric eigendecompositions.
    """
    root_a = _sqrt_psd(sigma_a)
    inner = root_a @ sigma_b @ root_a
    inner = (inner + inner.T) / 2
    trace_root = np.sqrt(np.clip(linalg.eigvalsh(inner), 0.0, None)).sum()

    diff = mu_a - mu_b
    value = diff @ diff + np.trace(sigma_a) + np.trace(sigma_b) - 2.0 * trace_root
    return float(max(value, 0.0))


def fid(features_a: ArrayLike, features_b: ArrayLike) -> float:
    """Fréchet distance between Gaussian fits of two sets of feature vectors.

    Each set needs more vectors than dimensions.

    >>> a = np.eye(3)[[0, 1, 2, 0, 1, 2]]
    >>> round(fid(a, a), 6)
    0.0
    """
    mu_a, sigma_a = gaussian_fit(features_a, "features_a")
    mu_b, sigma_b = gaussian_fit(features_b, "features_b")
    if mu_a.shape != mu_b.shape:
        raise MetricError(
            f"Feature sets have different dimensions: {mu_a.shape[0]} and {mu_b.shape[0]}",
        )

    return frechet_distance(mu_a, sigma_a, mu_b, sigma_b)


def label_endpoint_error(pred: ArrayLike, gt: ArrayLike, image_size: Size2D) -> float:
    """Mean Euclidean distance between matched points over the image diagonal."""
    pred = _as_float64(pred).reshape(-1, 2) if np.size(pred) else np.zeros((0, 2))
    gt = _as_float64(gt).reshape(-1, 2) if np.size(gt) else np.zeros((0, 2))
    if pred.shape != gt.shape:
        raise MetricError(f"Point counts differ: {len(pred)} predicted, {len(gt)} expected")
    if not len(gt):
        raise MetricError("Label endpoint error needs at least one point")

    diagonal = float(np.hypot(*image_size))
    return float(np.linalg.norm(pred - gt, axis=1).mean() / diagonal)


def mask_centroid(mask: Union[LabelMap, torch.Tensor]) -> Optional[Tuple[float, float]]:
    """(row, col) center of mass of a binary mask, `None` when it is empty."""
    values = mask.channels[0] if not isinstance(mask, torch.Tensor) else mask
    values = values.squeeze().to(torch.float64)
    total = values.sum()
    if total == 0:
        return None

    rows = torch.arange(values.shape[0], dtype=torch.float64)
    cols = torch.arange(values.shape[1], dtype=torch.float64)
    return (
        float((values.sum(dim=1) * rows).sum() / total),
        float((values.sum(dim=0) * cols).sum() / total),
    )


def mask_iou(pred: Union[LabelMap, torch.Tensor], gt: Union[LabelMap, torch.Tensor]) -> float:
    """Intersection over union of two binary masks; 1.0 when both are empty."""
    a = (pred.channels if not isinstance(pred, torch.Tensor) else pred) >= 0.5
    b = (gt.channels if not isinstance(gt, torch.Tensor) else gt) >= 0.5
    if a.shape != b.shape:
        raise MetricError(f"Mask shapes differ: {tuple(a.shape)} and {tuple(b.shape)}")

    union = (a | b).sum().item()
    if union == 0:
        return 1.0
    return (a & b).sum().item() / union


@dataclasses.dataclass(frozen=True)
class SegmentationScores:
    """Scene parsing scores.

    Classes absent from the ground truth do not count toward `per_class_acc`,
    classes absent from both maps do not count toward `class_iou`; they are
    listed in the `skipped_*` fields.
    """

    per_pixel_acc: float
    per_class_acc: float
    class_iou: float
    skipped_acc: Tuple[int, ...] = ()
    skipped_iou: Tuple[int, ...] = ()

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.per_pixel_acc, self.per_class_acc, self.class_iou)


def confusion_matrix(pred: ArrayLike, gt: ArrayLike, n_classes: int) -> np.ndarray:
    """`n_classes`×`n_classes` counts, rows indexed by ground truth."""
    pred = _as_float64(pred).astype(np.int64)
    gt = _as_float64(gt).astype(np.int64)
    if pred.shape != gt.shape:
        raise MetricError(f"Class maps differ in shape: {pred.shape} and {gt.shape}")
    for name, values in (("pred", pred), ("gt", gt)):
        if values.size and (values.min() < 0 or values.max() >= n_classes):
            raise MetricError(f"{name} holds classes outside [0, {n_classes})")

    return np.bincount(
        n_classes * gt.ravel() + pred.ravel(),
        minlength=n_classes**2,
    ).reshape(n_classes, n_classes)


def segmentation_scores(pred: ArrayLike, gt: ArrayLike, n_classes: int) -> SegmentationScores:
    """Per-pixel accuracy, mean per-class accuracy and mean class IoU.

    >>> segmentation_scores([[0, 1], [1, 1]], [[0, 0], [1, 1]], 2).as_tuple()[:2]
    (0.75, 0.75)
    """
    hist = confusion_matrix(pred, gt, n_classes).astype(np.float64)
    hits = np.diag(hist)
    gt_counts = hist.sum(axis=1)
    union = gt_counts + hist.sum(axis=0) - hits

    in_gt = gt_counts > 0
    in_either = union > 0
    total = hist.sum()
    return SegmentationScores(
        per_pixel_acc=float(hits.sum() / total) if total else 1.0,
        per_class_acc=float((hits[in_gt] / gt_counts[in_gt]).mean()) if in_gt.any() else 1.0,
        class_iou=float((hits[in_either] / union[in_either]).mean()) if in_either.any() else 1.0,
        skipped_acc=tuple(int(c) for c in np.flatnonzero(~in_gt)),
        skipped_iou=tuple(int(c) for c in np.flatnonzero(~in_either)),
    )


def center_box(size: Size2D, patch_size: int) -> Box:
    height, width = size
    if not 1 <= patch_size <= min(height, width):
        raise MetricError(f"Patch size {patch_size} does not fit a {height}×{width} image")
    return ((height - patch_size) // 2, (width - patch_size) // 2, patch_size, patch_size)


def crop(image: Image, box: Box) -> torch.Tensor:
    top, left, height, width = box
    if height <= 0 or width <= 0 or top < 0 or left < 0 or (
        top + height > image.height or left + width > image.width
    ):
        raise MetricError(f"Box {box} lies outside the {image.height}×{image.width} image")
    return image.pixels[:, top : top + height, left : left + width]


@torch.no_grad()
def extract_features(extractor: PerceptualExtractor, pixels: torch.Tensor) -> torch.Tensor:
    """Flattened, concatenated tap features of one 3×H×W tensor."""
    device = extractor.mean.device
    features: List[torch.Tensor] = extractor(pixels.unsqueeze(0).to(device))
    return torch.cat([f.flatten() for f in features]).to(torch.float64).cpu()


def patch_style_distance(
    extractor: PerceptualExtractor,
    img_a: Image,
    img_b: Image,
    box_a: Box,
    box_b: Box,
) -> float:
    """Mean absolute difference between the extractor features of two crops."""
    if box_a[2:] != box_b[2:]:
        raise MetricError(f"Boxes differ in size: {box_a[2:]} and {box_b[2:]}")

    features_a = extract_features(extractor, crop(img_a, box_a))
    features_b = extract_features(extractor, crop(img_b, box_b))
    return float((features_a - features_b).abs().sum() / features_a.numel())
