"""Frozen perceptual feature extractor and the adaptive semantic consistency loss."""

from __future__ import annotations

import dataclasses
import enum
import logging
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Union

import torch
from torch import nn
from torchvision.models import vgg16 as tv_vgg16

from exemplar_synth.exceptions import CheckpointError, ShapeError

if TYPE_CHECKING:
    from exemplar_synth.utils.typing import PathLike, Size2D

logger = logging.getLogger(__name__)

#: Index in `torchvision.models.vgg16().features` of each ReLU tap.
VGG16_TAPS: Dict[str, int] = {
    "relu1_2": 3,
    "relu2_2": 8,
    "relu3_3": 15,
    "relu4_3": 22,
    "relu5_3": 29,
}

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


class PerceptualExtractor(nn.Module):
    """Features of a frozen convolutional backbone at a list of tap points.

    Parameters
    ----------
        backbone:
            Layers applied in order; it is cut right after the deepest tap
        taps:
            Indices into `backbone` whose outputs are returned, in increasing order
        in_channels:
            Expected input channel count, if the backbone needs a fixed one
        imagenet_normalize:
            Map [-1, 1] inputs to ImageNet statistics before the backbone
        source:
            Human readable description of the weights, e.g. for metric reports

    """

    def __init__(
        self,
        backbone: nn.Sequential,
        taps: Sequence[int],
        *,
        in_channels: Optional[int] = None,
        imagenet_normalize: bool = False,
        source: str = "custom",
    ):
        super().__init__()
        taps = list(taps)
        if not taps:
            raise ValueError("A perceptual extractor needs at least one tap")
        if taps != sorted(set(taps)):
            raise ValueError(f"Taps must be strictly increasing, got {taps}")

        self.backbone = nn.Sequential(*list(backbone)[: taps[-1] + 1])
        self.taps = taps
        self.in_channels = in_channels
        self.imagenet_normalize = imagenet_normalize
        self.source = source
        self.register_buffer("mean", torch.tensor(IMAGENET_MEAN).view(1, 3, 1, 1))
        self.register_buffer("std", torch.tensor(IMAGENET_STD).view(1, 3, 1, 1))
        self._element_counts: Dict[Size2D, List[int]] = {}

        for param in self.backbone.parameters():
            param.requires_grad_(False)
        self.eval()

    def train(self, mode: bool = True) -> PerceptualExtractor:
        # Always in eval mode
        return super().train(False)

    @classmethod
    def vgg16(
        cls,
        layers: Sequence[str] = tuple(VGG16_TAPS),
        weights_path: Optional[PathLike] = None,
        seed: int = 0,
    ) -> PerceptualExtractor:
        """VGG-16 `features` tapped at `layers`.

        Pretrained weights are read from `weights_path` (checkpoint layout, keys
        as in `vgg16().features.state_dict()`). Without it the backbone keeps its
        default initialization drawn under `seed`.
        """
        unknown = [layer for layer in layers if layer not in VGG16_TAPS]
        if unknown:
            raise ValueError(f"Unknown VGG-16 taps: {', '.join(unknown)}")

        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(seed)
            features = tv_vgg16(weights=None).features

        if weights_path is not None:
            from exemplar_synth.networks.checkpoint import read_records

            _, records = read_records(weights_path)
            try:
                features.load_state_dict(records)
            except RuntimeError as e:
                raise CheckpointError(
                    f"{weights_path} does not hold VGG-16 feature weights: {e}",
                ) from e
            source = f"vgg16 ({weights_path})"
        else:
            source = f"vgg16 (random, seed {seed})"

        logger.debug("Built perceptual extractor: %s at %s", source, ", ".join(layers))
        return cls(
            features,
            sorted(VGG16_TAPS[layer] for layer in layers),
            in_channels=3,
            imagenet_normalize=True,
            source=source,
        )

    def forward(self, images: torch.Tensor) -> List[torch.Tensor]:
        if images.dim() != 4 or (
            self.in_channels is not None and images.shape[1] != self.in_channels
        ):
            raise ShapeError(
                "extractor input",
                f"shape B×{self.in_channels or 'C'}×H×W",
                tuple(images.shape),
            )

        h = images
        if self.imagenet_normalize:
            h = ((h + 1) / 2 - self.mean) / self.std

        features = []
        for index, layer in enumerate(self.backbone):
            h = layer(h)
            if index in self.taps:
                features.append(h)
        return features

    def element_counts(self, size: Size2D, channels: int = 3) -> List[int]:
        """M_i: element count of each tap's feature map for one input of `size`."""
        key = (size[0], size[1])
        if key not in self._element_counts:
            probe = torch.zeros(1, self.in_channels or channels, *key, device=self.mean.device)
            with torch.no_grad():
                self._element_counts[key] = [f[0].numel() for f in self(probe)]
        return self._element_counts[key]


class StyleRegime(str, enum.Enum):
    #: w_i = 1: match details at every depth
    CONSISTENT = "consistent"
    #: w_i = 1/M_i: every tap contributes its mean, suppressing detail matching
    INCONSISTENT = "inconsistent"


@dataclasses.dataclass(frozen=True)
class AdaptiveWeights:
    """Per-tap weights w_i of the semantic loss for one style regime.

    With `adaptive` off every regime uses w_i = 1.
    """

    regime: StyleRegime
    adaptive: bool = True

    @classmethod
    def for_sample(cls, style_consistent: bool, *, adaptive: bool = True) -> AdaptiveWeights:
        regime = StyleRegime.CONSISTENT if style_consistent else StyleRegime.INCONSISTENT
        return cls(regime, adaptive=adaptive)

    def weights(self, element_counts: Sequence[int]) -> List[float]:
        if self.regime is StyleRegime.CONSISTENT or not self.adaptive:
            return [1.0] * len(element_counts)
        return [1.0 / m for m in element_counts]


def adaptive_semantic_loss(
    extractor: PerceptualExtractor,
    z: torch.Tensor,
    fake: torch.Tensor,
    style_consistent: Union[bool, Sequence[bool], torch.Tensor],
    *,
    adaptive: bool = True,
) -> torch.Tensor:
    """Σ_i w_i · ||L_i(z) − L_i(fake)||₁ averaged over the batch.

    ||·||₁ is a sum over all elements of a tap. `style_consistent` selects the
    weights per batch element; `adaptive=False` uses w_i = 1 for every element.
    """
    if z.shape != fake.shape:
        raise ShapeError("fake", f"shape {tuple(z.shape)} of z", tuple(fake.shape))

    with torch.no_grad():
        target_features = extractor(z)
    fake_features = extractor(fake)

    batch = z.shape[0]
    consistent = torch.as_tensor(style_consistent, dtype=torch.bool, device=z.device)
    consistent = consistent.expand(batch) if consistent.dim() == 0 else consistent

    counts = [target[0].numel() for target in target_features]
    by_regime = {
        regime: z.new_tensor(AdaptiveWeights(regime, adaptive=adaptive).weights(counts))
        for regime in StyleRegime
    }
    # batch × taps
    weights = torch.where(
        consistent.unsqueeze(1),
        by_regime[StyleRegime.CONSISTENT].unsqueeze(0),
        by_regime[StyleRegime.INCONSISTENT].unsqueeze(0),
    )

    loss = z.new_zeros(())
    for i, (target, feature) in enumerate(zip(target_features, fake_features)):
        l1 = (feature - target).abs().flatten(1).sum(dim=1)
        loss = loss + (weights[:, i] * l1).mean()

    return loss
