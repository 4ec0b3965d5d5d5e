from __future__ import annotations

import dataclasses
from typing import Sequence, Union

import torch

from exemplar_synth.config import LossWeights
from exemplar_synth.exceptions import ShapeError

Scalar = Union[torch.Tensor, float]


@dataclasses.dataclass(frozen=True)
class GeneratorLossParts:
    """Unweighted generator loss terms computed on one batch.

    Attributes
    ----------
        std:
            LSGAN loss against D_R
        style:
            LSGAN loss against D_SC
        semantic:
            Adaptive semantic consistency loss
        fm:
            Discriminator feature-matching loss

    """

    std: Scalar
    style: Scalar
    semantic: Scalar
    fm: Scalar = 0.0


def feature_matching_loss(
    real_features: Sequence[torch.Tensor],
    fake_features: Sequence[torch.Tensor],
) -> torch.Tensor:
    """Σ_i (1/N_i) ||D_i(x, z) − D_i(x, fake)||₁, N_i being the element count of layer i.

    Real features are treated as constants.
    """
    if len(real_features) != len(fake_features):
        raise ShapeError("fake_features", f"{len(real_features)} layers", len(fake_features))

    total = fake_features[0].new_zeros(())
    for i, (real, fake) in enumerate(zip(real_features, fake_features)):
        if real.shape != fake.shape:
            raise ShapeError(f"fake_features[{i}]", f"shape {tuple(real.shape)}", tuple(fake.shape))
        total = total + (real.detach() - fake).abs().mean()
    return total


def total_generator_loss(
    parts: GeneratorLossParts,
    weights: LossWeights,
    *,
    scadv_enabled: bool = True,
) -> Scalar:
    """std + λ₁·style + λ₂·semantic + λ_fm·fm.

    The style term is dropped unless both `weights.scadv_enabled` and
    `scadv_enabled` (the schedule's switch) are set; the feature-matching term is
    dropped when its weight is zero.
    """
    total = parts.std + weights.lambda2 * parts.semantic
    if weights.scadv_enabled and scadv_enabled:
        total = total + weights.lambda1 * parts.style
    if weights.lambda_fm:
        total = total + weights.lambda_fm * parts.fm
    return total
