import math

import numpy as np
import pytest
import torch

from exemplar_synth.eval import (
    center_box,
    confusion_matrix,
    crop,
    fid,
    frechet_distance,
    label_endpoint_error,
    mask_centroid,
    mask_iou,
    patch_style_distance,
    segmentation_scores,
)
from exemplar_synth.exceptions import MetricError
from exemplar_synth.types import Image


def test_fid_of_identical_sets():
    features = np.random.default_rng(0).normal(size=(500, 8))
    assert fid(features, features) == pytest.approx(0.0, abs=1e-8)


def test_fid_of_shifted_gaussians():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(100_000, 2))
    b = rng.normal(size=(100_000, 2)) + [1.0, 0.0]
    assert fid(a, b) == pytest.approx(1.0, rel=0.05)
    assert fid(a, b) == pytest.approx(fid(b, a), rel=1e-9)


def test_frechet_distance_of_scaled_covariance():
    zero = np.zeros(3)
    # |0|² + tr(I) + tr(4I) - 2 tr(2I)
    assert frechet_distance(zero, np.eye(3), zero, 4 * np.eye(3)) == pytest.approx(3.0)


def test_fid_accepts_tensors():
    features = torch.randn(20, 3, generator=torch.Generator().manual_seed(0))
    assert fid(features, features + 2) == pytest.approx(12.0)


@pytest.mark.parametrize(
    ("a", "b", "match"),
    [
        (np.zeros((3, 4)), np.zeros((10, 4)), "at least 5 vectors, got 3"),
        (np.zeros((10, 4)), np.zeros((10, 3)), "different dimensions"),
        (np.zeros(10), np.zeros(10), "2D array"),
    ],
)
def test_fid_errors(a, b, match):
    with pytest.raises(MetricError, match=match):
        fid(a, b)


def test_segmentation_scores():
    scores = segmentation_scores([[0, 1], [1, 1]], [[0, 0], [1, 1]], 2)
    assert scores.per_pixel_acc == 0.75
    assert scores.per_class_acc == 0.75
    assert scores.class_iou == pytest.approx(0.5833, abs=1e-4)
    assert scores.skipped_acc == scores.skipped_iou == ()


def test_segmentation_skips_absent_classes():
    scores = segmentation_scores([[0, 2], [2, 2]], [[0, 0], [0, 0]], 3)
    assert scores.per_pixel_acc == 0.25
    assert scores.per_class_acc == 0.25
    assert scores.skipped_acc == (1, 2)
    assert scores.skipped_iou == (1,)
    assert scores.class_iou == pytest.approx(0.125)


def test_confusion_matrix():
    hist = confusion_matrix([[0, 1], [1, 1]], [[0, 0], [1, 1]], 2)
    assert hist.tolist() == [[1, 1], [0, 2]]
    with pytest.raises(MetricError, match="outside"):
        confusion_matrix([[0, 3]], [[0, 1]], 2)
    with pytest.raises(MetricError, match="shape"):
        confusion_matrix([[0, 1]], [[0], [1]], 2)


def test_label_endpoint_error():
    error = label_endpoint_error([[0.0, 0.0]], [[3.0, 4.0]], (256, 256))
    assert error == pytest.approx(5 / (256 * math.sqrt(2)))
    assert error == pytest.approx(0.01381, abs=1e-5)

    with pytest.raises(MetricError, match="Point counts differ"):
        label_endpoint_error([[0, 0], [1, 1]], [[0, 0]], (16, 16))
    with pytest.raises(MetricError, match="at least one point"):
        label_endpoint_error([], [], (16, 16))


def test_masks():
    mask = torch.zeros(1, 8, 8)
    mask[0, 2:4, 4:8] = 1.0
    assert mask_centroid(mask) == (2.5, 5.5)
    assert mask_centroid(torch.zeros(1, 8, 8)) is None

    other = torch.zeros(1, 8, 8)
    other[0, 2:4, 6:8] = 1.0
    assert mask_iou(other, mask) == 0.5
    assert mask_iou(torch.zeros(1, 4, 4), torch.zeros(1, 4, 4)) == 1.0
    with pytest.raises(MetricError):
        mask_iou(torch.zeros(1, 4, 4), torch.zeros(1, 8, 8))


def test_boxes():
    assert center_box((32, 48), 16) == (8, 16, 16, 16)
    with pytest.raises(MetricError, match="does not fit"):
        center_box((32, 48), 40)

    image = Image(torch.zeros(3, 32, 32))
    assert crop(image, (0, 0, 16, 8)).shape == (3, 16, 8)
    with pytest.raises(MetricError, match="outside"):
        crop(image, (20, 0, 16, 16))


def test_patch_style_distance(small_extractor):
    a = Image(torch.full((3, 32, 32), -0.5))
    b = Image(torch.full((3, 32, 32), 0.5))
    box = center_box(a.size, 16)
    assert patch_style_distance(small_extractor, a, a, box, box) == 0.0
    assert patch_style_distance(small_extractor, a, b, box, box) > 0.0
    assert patch_style_distance(small_extractor, a, b, box, box) == patch_style_distance(
        small_extractor,
        b,
        a,
        box,
        box,
    )

    with pytest.raises(MetricError, match="differ in size"):
        patch_style_distance(small_extractor, a, b, box, (0, 0, 8, 8))
