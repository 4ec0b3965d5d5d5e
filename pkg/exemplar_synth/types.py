"""Domain value types shared by every module.

Tensors are channel-first: an `Image` wraps a 3×H×W tensor and a `LabelMap` a
C_l×H×W tensor. Both are immutable once built and validate their invariants on
construction.
"""

from __future__ import annotations

import dataclasses
import enum
from typing import TYPE_CHECKING, Optional, Sequence

import torch

from .exceptions import ShapeError
from .utils.imageio import read_rgb_png, uint8_to_unit, unit_to_uint8, write_png

if TYPE_CHECKING:
    import numpy as np

    from .utils.typing import PathLike, Size2D

#: Four stride-2 halvings in the generator encoder.
SPATIAL_MULTIPLE = 16


class LabelKind(str, enum.Enum):
    SKETCH = "sketch"
    POSE = "pose"
    PARSING = "parsing"
    TOY_MASK = "toy-mask"


def check_spatial_size(size: Size2D, name: str = "image"):
    height, width = size
    if height <= 0 or width <= 0:
        raise ShapeError(name, "positive height and width", size)
    if height % SPATIAL_MULTIPLE or width % SPATIAL_MULTIPLE:
        raise ShapeError(name, f"height and width divisible by {SPATIAL_MULTIPLE}", size)


@dataclasses.dataclass(frozen=True, eq=False)
class Image:
    """An RGB image with values in [-1, 1].

    Attributes
    ----------
        pixels:
            Float tensor of shape 3×H×W

    """

    pixels: torch.Tensor

    def __post_init__(self):
        pixels = self.pixels
        if pixels.dim() != 3 or pixels.shape[0] != 3:
            raise ShapeError("image", "shape 3×H×W", tuple(pixels.shape))

        check_spatial_size(self.size)
        if not torch.isfinite(pixels).all():
            raise ValueError("Image pixels must be finite")
        if pixels.min() < -1.0 or pixels.max() > 1.0:
            raise ValueError("Image pixels must lie within [-1, 1]")

    @property
    def height(self) -> int:
        return self.pixels.shape[1]

    @property
    def width(self) -> int:
        return self.pixels.shape[2]

    @property
    def size(self) -> Size2D:
        return (self.height, self.width)

    @classmethod
    def from_uint8(cls, array: np.ndarray) -> Image:
        return cls(uint8_to_unit(array))

    @classmethod
    def from_png(cls, path: PathLike) -> Image:
        return cls.from_uint8(read_rgb_png(path))

    def to_uint8(self) -> np.ndarray:
        return unit_to_uint8(self.pixels)

    def to_png(self, path: PathLike):
        write_png(path, self.to_uint8())


@dataclasses.dataclass(frozen=True, eq=False)
class LabelMap:
    """Semantic labels of an image, e.g. x or F(I).

    Attributes
    ----------
        channels:
            Float tensor of shape C_l×H×W
        kind:
            What the channels encode

    """

    channels: torch.Tensor
    kind: LabelKind

    def __post_init__(self):
        channels = self.channels
        if channels.dim() != 3 or channels.shape[0] < 1:
            raise ShapeError("label map", "shape C×H×W with C >= 1", tuple(channels.shape))

        check_spatial_size(self.size, "label map")
        if self.kind is LabelKind.TOY_MASK:
            if channels.shape[0] != 1 or not ((channels == 0) | (channels == 1)).all():
                raise ValueError("toy-mask label maps hold a single {0, 1} channel")
        elif self.kind is LabelKind.PARSING and not torch.equal(
            channels.sum(dim=0),
            torch.ones_like(channels[0]),
        ):
            raise ValueError("parsing label maps must be one-hot per pixel")

    @property
    def n_channels(self) -> int:
        return self.channels.shape[0]

    @property
    def size(self) -> Size2D:
        return (self.channels.shape[1], self.channels.shape[2])


@dataclasses.dataclass(frozen=True, order=True)
class ImageRef:
    """Reference to one corpus image, serialized as `group/video/frame`."""

    group_id: int
    video_id: str
    frame_index: int

    def __str__(self) -> str:
        return f"{self.group_id}/{self.video_id}/{self.frame_index}"

    @classmethod
    def parse(cls, value: str) -> ImageRef:
        group_id, video_id, frame_index = value.strip().split("/")
        return cls(int(group_id), video_id, int(frame_index))


@dataclasses.dataclass(frozen=True, eq=False)
class TrainingSample:
    """One generator input/target tuple.

    `x = F(z)`; `exemplar` is the style guidance I with labels `exemplar_labels`.
    """

    x: LabelMap
    z: Image
    exemplar: Image
    exemplar_labels: LabelMap
    style_consistent: bool
    ref_a: Optional[ImageRef] = None
    ref_b: Optional[ImageRef] = None

    def __post_init__(self):
        if self.x.size != self.z.size:
            raise ShapeError("x", f"spatial size {self.z.size} of z", self.x.size)
        if self.exemplar_labels.size != self.exemplar.size:
            raise ShapeError(
                "exemplar_labels",
                f"spatial size {self.exemplar.size} of the exemplar",
                self.exemplar_labels.size,
            )


def stack_images(images: Sequence[Image]) -> torch.Tensor:
    return torch.stack([img.pixels for img in images])


def stack_labels(labels: Sequence[LabelMap]) -> torch.Tensor:
    return torch.stack([label.channels for label in labels])
