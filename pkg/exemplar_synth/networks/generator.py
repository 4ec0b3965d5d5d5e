"""Encoder / residual / decoder generator.

Layer naming follows the usual image-translation convention: `c7s1-k` is a 7×7
stride-1 conv, `dk` a 3×3 stride-2 conv, `Rk` a residual block of two 3×3 convs
and `uk` a 3×3 stride-1/2 transposed conv, each followed by instance norm and
ReLU. The full stack is::

    c7s1-64, d128, d256, d512, d1024, R1024×9, u512, u256, u128, u64, c7s1-3

with widths scaled by `base_width / 64`.
"""

from __future__ import annotations

import dataclasses
from typing import List, Tuple

import torch
from torch import nn

from exemplar_synth.exceptions import ShapeError
from exemplar_synth.types import SPATIAL_MULTIPLE

N_DOWNSAMPLINGS = 4


@dataclasses.dataclass(frozen=True)
class GeneratorSpec:
    label_channels: int
    base_width: int = 64
    n_blocks: int = 9

    @property
    def in_channels(self) -> int:
        # [x, I, F(I)]
        return 2 * self.label_channels + 3

    @property
    def encoder_widths(self) -> List[int]:
        return [self.base_width * 2**i for i in range(N_DOWNSAMPLINGS + 1)]

    @property
    def innermost_width(self) -> int:
        return self.encoder_widths[-1]


def _conv_norm_relu(in_ch: int, out_ch: int, kernel: int, stride: int) -> List[nn.Module]:
    return [
        nn.Conv2d(
            in_ch,
            out_ch,
            kernel_size=kernel,
            stride=stride,
            padding=kernel // 2,
            padding_mode="reflect",
        ),
        nn.InstanceNorm2d(out_ch),
        nn.ReLU(inplace=True),
    ]


class ResidualBlock(nn.Module):
    def __init__(self, width: int):
        super().__init__()
        self.block = nn.Sequential(
            *_conv_norm_relu(width, width, 3, 1),
            nn.Conv2d(width, width, kernel_size=3, padding=1, padding_mode="reflect"),
            nn.InstanceNorm2d(width),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.block(x)


class Generator(nn.Module):
    """G(x, I, F(I)): synthesizes an image with the semantics of x and the style of I."""

    def __init__(self, spec: GeneratorSpec):
        super().__init__()
        self.spec = spec
        widths = spec.encoder_widths

        encoder: List[nn.Module] = _conv_norm_relu(spec.in_channels, widths[0], 7, 1)
        for in_ch, out_ch in zip(widths, widths[1:]):
            encoder += _conv_norm_relu(in_ch, out_ch, 3, 2)
        self.encoder = nn.Sequential(*encoder)

        self.blocks = nn.Sequential(*(ResidualBlock(widths[-1]) for _ in range(spec.n_blocks)))

        decoder: List[nn.Module] = []
        for in_ch, out_ch in zip(widths[:0:-1], widths[-2::-1]):
            decoder += [
                nn.ConvTranspose2d(
                    in_ch,
                    out_ch,
                    kernel_size=3,
                    stride=2,
                    padding=1,
                    output_padding=1,
                ),
                nn.InstanceNorm2d(out_ch),
                nn.ReLU(inplace=True),
            ]
        decoder += [
            nn.Conv2d(widths[0], 3, kernel_size=7, padding=3, padding_mode="reflect"),
            nn.Tanh(),
        ]
        self.decoder = nn.Sequential(*decoder)

    def _check_inputs(self, x: torch.Tensor, exemplar: torch.Tensor, exemplar_labels: torch.Tensor):
        label_channels = self.spec.label_channels
        for name, tensor, channels in (
            ("x", x, label_channels),
            ("exemplar", exemplar, 3),
            ("exemplar_labels", exemplar_labels, label_channels),
        ):
            if tensor.dim() != 4 or tensor.shape[1] != channels:
                raise ShapeError(name, f"shape B×{channels}×H×W", tuple(tensor.shape))

        size = x.shape[2:]
        for name, tensor in (("exemplar", exemplar), ("exemplar_labels", exemplar_labels)):
            if tensor.shape[2:] != size:
                raise ShapeError(name, f"spatial size {tuple(size)} of x", tuple(tensor.shape[2:]))
        if size[0] % SPATIAL_MULTIPLE or size[1] % SPATIAL_MULTIPLE:
            raise ShapeError("x", f"height and width divisible by {SPATIAL_MULTIPLE}", tuple(size))

    def forward_with_innermost(
        self,
        x: torch.Tensor,
        exemplar: torch.Tensor,
        exemplar_labels: torch.Tensor,
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """Return the synthesized image and the innermost feature map."""
        self._check_inputs(x, exemplar, exemplar_labels)
        innermost = self.blocks(self.encoder(torch.cat([x, exemplar, exemplar_labels], dim=1)))
        return self.decoder(innermost), innermost

    def forward(
        self,
        x: torch.Tensor,
        exemplar: torch.Tensor,
        exemplar_labels: torch.Tensor,
    ) -> torch.Tensor:
        return self.forward_with_innermost(x, exemplar, exemplar_labels)[0]
