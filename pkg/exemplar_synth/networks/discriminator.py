"""PatchGAN discriminator shared by D_R and D_SC.

Stages `C64, C128, C256, C512` are 4×4 stride-2 convolutions with zero padding
2, instance norm on every stage but the first and LeakyReLU(0.2), followed by
a 4×4 stride-1 projection to one channel. At 256×256 input the score map is
18×18 and every score sees a 94×94 input patch.
"""

from __future__ import annotations

import dataclasses
from typing import List, Tuple, Union, overload

import torch
from torch import nn
from typing_extensions import Literal

from exemplar_synth.exceptions import ShapeError

KERNEL_SIZE = 4
PADDING = 2
LEAKY_SLOPE = 0.2
N_STAGES = 4


@dataclasses.dataclass(frozen=True)
class DiscriminatorSpec:
    in_channels: int
    base_width: int = 64
    normalization: str = "instance"

    @property
    def widths(self) -> List[int]:
        return [self.base_width * 2**i for i in range(N_STAGES)]


class PatchDiscriminator(nn.Module):
    def __init__(self, spec: DiscriminatorSpec):
        super().__init__()
        self.spec = spec

        stages = []
        in_ch = spec.in_channels
        for i, width in enumerate(spec.widths):
            layers: List[nn.Module] = [
                nn.Conv2d(in_ch, width, kernel_size=KERNEL_SIZE, stride=2, padding=PADDING),
            ]
            if i > 0 and spec.normalization == "instance":
                layers.append(nn.InstanceNorm2d(width))
            layers.append(nn.LeakyReLU(LEAKY_SLOPE, inplace=True))
            stages.append(nn.Sequential(*layers))
            in_ch = width

        self.stages = nn.ModuleList(stages)
        self.projection = nn.Conv2d(in_ch, 1, kernel_size=KERNEL_SIZE, stride=1, padding=PADDING)

    def conv_geometry(self) -> List[Tuple[int, int, int]]:
        """(kernel, stride, padding) of every convolution, input to output."""
        return [(KERNEL_SIZE, 2, PADDING)] * N_STAGES + [(KERNEL_SIZE, 1, PADDING)]

    @overload
    def forward(
        self,
        inputs: torch.Tensor,
        return_features: Literal[False] = ...,
    ) -> torch.Tensor: ...

    @overload
    def forward(
        self,
        inputs: torch.Tensor,
        return_features: Literal[True],
    ) -> Tuple[torch.Tensor, List[torch.Tensor]]: ...

    def forward(
        self,
        inputs: torch.Tensor,
        return_features: bool = False,
    ) -> Union[torch.Tensor, Tuple[torch.Tensor, List[torch.Tensor]]]:
        """Score map of shape B×1×H'×W'.

        With `return_features` the per-stage activations are returned as well.
        """
        if inputs.dim() != 4 or inputs.shape[1] != self.spec.in_channels:
            raise ShapeError(
                "discriminator input",
                f"shape B×{self.spec.in_channels}×H×W",
                tuple(inputs.shape),
            )

        features = []
        h = inputs
        for stage in self.stages:
            h = stage(h)
            features.append(h)
        scores = self.projection(h)

        if return_features:
            return scores, features
        return scores
