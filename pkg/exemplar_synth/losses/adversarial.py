"""Least-squares adversarial losses.

Real-class targets are 1 and fake-class targets 0. Score maps are averaged over
every patch and batch element.
"""

from __future__ import annotations

from typing import Callable, Optional, Tuple

import torch

from exemplar_synth.exceptions import BatchCompositionError, TrainingDivergenceError

ImagePair = Tuple[torch.Tensor, torch.Tensor]
PairScorer = Callable[[torch.Tensor, torch.Tensor], torch.Tensor]


def check_finite(tensor: torch.Tensor, what: str):
    if not torch.isfinite(tensor).all():
        raise TrainingDivergenceError(what)


def lsgan_d_loss(real_scores: torch.Tensor, fake_scores: torch.Tensor) -> torch.Tensor:
    check_finite(real_scores, "real scores")
    check_finite(fake_scores, "fake scores")
    return ((real_scores - 1) ** 2).mean() + (fake_scores**2).mean()


def lsgan_g_loss(fake_scores: torch.Tensor) -> torch.Tensor:
    check_finite(fake_scores, "fake scores")
    return ((fake_scores - 1) ** 2).mean()


def require_style_pairs(
    consistent_pair: Optional[ImagePair],
    inconsistent_pair: Optional[ImagePair],
    exemplar: Optional[torch.Tensor],
    fake: Optional[torch.Tensor],
):
    missing = [
        name
        for name, value in (
            ("style-consistent pair", consistent_pair),
            ("style-inconsistent pair", inconsistent_pair),
            ("exemplar", exemplar),
            ("synthesized image", fake),
        )
        if value is None
    ]
    if missing:
        raise BatchCompositionError(
            f"Style-consistency losses need all three pair kinds; missing {', '.join(missing)}",
        )


def style_d_loss(
    d_style: PairScorer,
    consistent_pair: ImagePair,
    inconsistent_pair: ImagePair,
    exemplar: torch.Tensor,
    fake: torch.Tensor,
) -> torch.Tensor:
    consistent_scores = d_style(*consistent_pair)
    inconsistent_scores = d_style(*inconsistent_pair)
    generated_scores = d_style(exemplar, fake.detach())
    for what, scores in (
        ("D_SC scores of consistent pairs", consistent_scores),
        ("D_SC scores of inconsistent pairs", inconsistent_scores),
        ("D_SC scores of generated pairs", generated_scores),
    ):
        check_finite(scores, what)

    return (
        ((consistent_scores - 1) ** 2).mean()
        + (inconsistent_scores**2).mean()
        + (generated_scores**2).mean()
    )


def style_g_loss(d_style: PairScorer, exemplar: torch.Tensor, fake: torch.Tensor) -> torch.Tensor:
    scores = d_style(exemplar, fake)
    check_finite(scores, "D_SC scores of generated pairs")
    return ((scores - 1) ** 2).mean()


def style_adv_losses(
    d_style: PairScorer,
    consistent_pair: Optional[ImagePair],
    inconsistent_pair: Optional[ImagePair],
    exemplar: Optional[torch.Tensor],
    fake: Optional[torch.Tensor],
) -> Tuple[torch.Tensor, torch.Tensor]:
    """Losses of the style-consistency discriminator and of the generator against it.

    `d_style(a, b)` scores an ordered image pair. The discriminator learns
    `consistent_pair` as real and both `inconsistent_pair` and
    `(exemplar, fake)` as fake; the generator pushes `(exemplar, fake)` toward
    real. The discriminator loss sees `fake` detached, so generator gradients
    only flow through the generator loss.
    """
    require_style_pairs(consistent_pair, inconsistent_pair, exemplar, fake)
    assert consistent_pair is not None and inconsistent_pair is not None
    assert exemplar is not None and fake is not None

    return (
        style_d_loss(d_style, consistent_pair, inconsistent_pair, exemplar, fake),
        style_g_loss(d_style, exemplar, fake),
    )
