import numpy as np
import pytest
import torch

from exemplar_synth.exceptions import ShapeError
from exemplar_synth.types import (
    Image,
    ImageRef,
    LabelKind,
    LabelMap,
    TrainingSample,
    check_spatial_size,
    stack_images,
)


def test_image_uint8_conversion():
    array = np.zeros((16, 32, 3), dtype=np.uint8)
    array[0, 0] = (255, 0, 128)
    image = Image.from_uint8(array)
    assert image.size == (16, 32)
    assert image.pixels[:, 0, 0].tolist() == pytest.approx([1.0, -1.0, 128 / 127.5 - 1.0])
    assert np.array_equal(image.to_uint8(), array)


def test_image_png(tmp_path):
    array = np.random.default_rng(0).integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
    Image.from_uint8(array).to_png(tmp_path / "img.png")
    assert np.array_equal(Image.from_png(tmp_path / "img.png").to_uint8(), array)


@pytest.mark.parametrize(
    "pixels",
    [
        torch.zeros(1, 16, 16),
        torch.zeros(3, 16),
        torch.zeros(3, 16, 20),
    ],
)
def test_image_shape(pixels):
    with pytest.raises(ShapeError):
        Image(pixels)


def test_image_range():
    with pytest.raises(ValueError, match=r"\[-1, 1\]"):
        Image(torch.full((3, 16, 16), 1.5))
    with pytest.raises(ValueError, match="finite"):
        Image(torch.full((3, 16, 16), float("nan")))


def test_check_spatial_size():
    check_spatial_size((256, 32))
    with pytest.raises(ShapeError, match="divisible by 16"):
        check_spatial_size((256, 250))


def test_toy_label_map():
    mask = torch.zeros(1, 16, 16)
    mask[0, 4:8, 4:8] = 1
    assert LabelMap(mask, LabelKind.TOY_MASK).n_channels == 1

    with pytest.raises(ValueError, match="toy-mask"):
        LabelMap(mask * 0.5, LabelKind.TOY_MASK)
    with pytest.raises(ValueError, match="toy-mask"):
        LabelMap(torch.zeros(2, 16, 16), LabelKind.TOY_MASK)


def test_parsing_label_map():
    one_hot = torch.nn.functional.one_hot(torch.zeros(16, 16, dtype=torch.int64), 3)
    LabelMap(one_hot.permute(2, 0, 1).float(), LabelKind.PARSING)

    with pytest.raises(ValueError, match="one-hot"):
        LabelMap(torch.zeros(3, 16, 16), LabelKind.PARSING)


def test_image_ref():
    ref = ImageRef(3, "clip-07", 42)
    assert str(ref) == "3/clip-07/42"
    assert ImageRef.parse(" 3/clip-07/42\n") == ref
    assert ImageRef(0, "b", 9) < ImageRef(1, "a", 0)

    with pytest.raises(ValueError):
        ImageRef.parse("3/clip-07")


def test_training_sample_sizes():
    image = Image(torch.zeros(3, 16, 16))
    labels = LabelMap(torch.zeros(1, 32, 32), LabelKind.SKETCH)
    with pytest.raises(ShapeError, match='"x"'):
        TrainingSample(x=labels, z=image, exemplar=image, exemplar_labels=labels, style_consistent=True)


def test_stack_images():
    images = [Image(torch.full((3, 16, 16), v)) for v in (-1.0, 0.0, 1.0)]
    batch = stack_images(images)
    assert batch.shape == (3, 3, 16, 16)
    assert batch[:, 0, 0, 0].tolist() == [-1.0, 0.0, 1.0]
