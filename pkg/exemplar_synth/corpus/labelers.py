"""The labeling function F: image -> semantic label map."""

from __future__ import annotations

import abc
import enum
from pathlib import Path
from typing import TYPE_CHECKING, Optional

from exemplar_synth.exceptions import LabelerUnavailableError, ShapeError
from exemplar_synth.types import Image, LabelKind, LabelMap

from .base import labels_from_array, read_label_array
from .toy import toy_label

if TYPE_CHECKING:
    from exemplar_synth.utils.typing import PathLike


class LabelerKind(str, enum.Enum):
    TOY_MASK = "toy-mask"
    EXTERNAL_PRECOMPUTED = "external-precomputed"


class Labeler(abc.ABC):
    """Maps an image to its semantic labels.

    Subclasses set `kind` and implement `label`; the output always has the
    spatial size of the input image.
    """

    kind: LabelerKind
    label_kind: LabelKind

    def __init__(self, n_channels: int):
        self.n_channels = n_channels

    @property
    def can_relabel(self) -> bool:
        """Whether new images, e.g. synthesized ones, can be labeled."""
        return True

    @abc.abstractmethod
    def label(self, image: Image) -> LabelMap: ...

    def __call__(self, image: Image) -> LabelMap:
        labels = self.label(image)
        if labels.size != image.size:
            raise ShapeError("labels", f"spatial size {image.size}", labels.size)
        return labels


class ToyLabeler(Labeler):
    kind = LabelerKind.TOY_MASK
    label_kind = LabelKind.TOY_MASK

    def __init__(self, n_channels: int = 1):
        if n_channels != 1:
            raise ShapeError("toy labels", "1 channel", n_channels)
        super().__init__(n_channels)

    def label(self, image: Image) -> LabelMap:
        return toy_label(image)


class PrecomputedLabeler(Labeler):
    """Labels produced offline by an external detector and stored as files.

    Only `label_file` can be served; there is no way to label an unseen image.
    """

    kind = LabelerKind.EXTERNAL_PRECOMPUTED

    def __init__(self, label_kind: LabelKind, n_channels: int):
        super().__init__(n_channels)
        self.label_kind = label_kind

    @property
    def can_relabel(self) -> bool:
        return False

    def label(self, image: Image) -> LabelMap:
        raise LabelerUnavailableError(
            f"{self.label_kind.value} labels come from an external detector "
            "and cannot be computed for new images",
            suggestion="Run the detector offline and pass the label file instead",
        )

    def label_file(self, path: PathLike) -> LabelMap:
        path = Path(path)
        return labels_from_array(
            read_label_array(path, self.label_kind, self.n_channels),
            self.label_kind,
            self.n_channels,
            name=str(path),
        )


def make_labeler(kind: LabelKind, n_channels: Optional[int] = None) -> Labeler:
    """Pick the labeler serving label maps of `kind`."""
    if kind is LabelKind.TOY_MASK:
        return ToyLabeler(1 if n_channels is None else n_channels)
    return PrecomputedLabeler(kind, 1 if n_channels is None else n_channels)
