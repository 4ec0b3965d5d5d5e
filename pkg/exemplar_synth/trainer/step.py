from __future__ import annotations

import dataclasses
import functools
import logging
from typing import TYPE_CHECKING, Iterable, List, Sequence

from torch import nn

from exemplar_synth.exceptions import TrainingDivergenceError
from exemplar_synth.losses.adversarial import (
    check_finite,
    lsgan_d_loss,
    lsgan_g_loss,
    require_style_pairs,
    style_d_loss,
    style_g_loss,
)
from exemplar_synth.losses.objective import (
    GeneratorLossParts,
    feature_matching_loss,
    total_generator_loss,
)
from exemplar_synth.losses.perceptual import adaptive_semantic_loss
from exemplar_synth.networks.state import discriminate_real, discriminate_style

from .schedule import lr_at, scadv_enabled_at

if TYPE_CHECKING:
    from exemplar_synth.config import LossWeights
    from exemplar_synth.losses.perceptual import PerceptualExtractor
    from exemplar_synth.networks.state import NetworkState

    from .schedule import PhaseSchedule
    from .stream import StepBatch

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class LossRecord:
    """Every loss component of one step, as logged to `losses.csv`.

    `d_style` and `g_style` are 0 while the style-consistency loss is off.
    """

    iteration: int
    lr: float
    d_real: float
    d_style: float
    g_std: float
    g_style: float
    g_semantic: float
    g_fm: float
    g_total: float

    @classmethod
    def columns(cls) -> List[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def to_row(self) -> List[str]:
        return [str(self.iteration)] + [repr(float(getattr(self, c))) for c in self.columns()[1:]]

    @classmethod
    def from_row(cls, row: Sequence[str]) -> LossRecord:
        return cls(int(row[0]), *(float(value) for value in row[1:]))


def _set_requires_grad(nets: Iterable[nn.Module], flag: bool):
    for net in nets:
        for param in net.parameters():
            param.requires_grad_(flag)


def training_step(
    state: NetworkState,
    batch: StepBatch,
    *,
    schedule: PhaseSchedule,
    weights: LossWeights,
    extractor: PerceptualExtractor,
) -> LossRecord:
    """One D_R update, one D_SC update (when the style loss is on) and one G update.

    Every update uses Adam at `lr_at(schedule, state.iteration)`. The iteration
    counter of `state` is advanced on success.
    """
    iteration = state.iteration
    lr = lr_at(schedule, iteration)
    scadv = weights.scadv_enabled and scadv_enabled_at(schedule, iteration)
    for optimizer in state.optimizers().values():
        for group in optimizer.param_groups:
            group["lr"] = lr

    try:
        return _step(state, batch, lr=lr, scadv=scadv, weights=weights, extractor=extractor)
    except TrainingDivergenceError as e:
        raise TrainingDivergenceError(e.what, iteration) from e


def _step(
    state: NetworkState,
    batch: StepBatch,
    *,
    lr: float,
    scadv: bool,
    weights: LossWeights,
    extractor: PerceptualExtractor,
) -> LossRecord:
    iteration = state.iteration
    d_style = functools.partial(discriminate_style, state)
    if scadv:
        require_style_pairs(batch.consistent_pair, batch.inconsistent_pair, batch.exemplar, batch.z)

    fake = state.generator(batch.x, batch.exemplar, batch.exemplar_labels)
    check_finite(fake, "generator output")

    # D_R
    state.opt_d_real.zero_grad(set_to_none=True)
    d_real_loss = lsgan_d_loss(
        discriminate_real(state, batch.x, batch.z),
        discriminate_real(state, batch.x, fake.detach()),
    )
    d_real_loss.backward()
    state.opt_d_real.step()

    # D_SC
    d_style_value = 0.0
    if scadv:
        assert batch.consistent_pair is not None and batch.inconsistent_pair is not None
        state.opt_d_style.zero_grad(set_to_none=True)
        d_style_loss = style_d_loss(
            d_style,
            batch.consistent_pair,
            batch.inconsistent_pair,
            batch.exemplar,
            fake,
        )
        d_style_loss.backward()
        state.opt_d_style.step()
        d_style_value = d_style_loss.item()

    # G
    discriminators = [state.d_real, state.d_style]
    _set_requires_grad(discriminators, False)
    try:
        state.opt_g.zero_grad(set_to_none=True)
        if weights.lambda_fm:
            fake_scores, fake_features = discriminate_real(
                state,
                batch.x,
                fake,
                return_features=True,
            )
            _, real_features = discriminate_real(state, batch.x, batch.z, return_features=True)
            fm = feature_matching_loss(real_features, fake_features)
        else:
            fake_scores = discriminate_real(state, batch.x, fake)
            fm = fake.new_zeros(())

        parts = GeneratorLossParts(
            std=lsgan_g_loss(fake_scores),
            style=style_g_loss(d_style, batch.exemplar, fake) if scadv else fake.new_zeros(()),
            semantic=adaptive_semantic_loss(
                extractor,
                batch.z,
                fake,
                batch.style_consistent,
                adaptive=weights.adaptive,
            ),
            fm=fm,
        )
        g_total = total_generator_loss(parts, weights, scadv_enabled=scadv)
        check_finite(g_total, "generator loss")
        g_total.backward()
        state.opt_g.step()
    finally:
        _set_requires_grad(discriminators, True)

    state.iteration = iteration + 1
    return LossRecord(
        iteration=iteration,
        lr=lr,
        d_real=d_real_loss.item(),
        d_style=d_style_value,
        g_std=parts.std.item(),
        g_style=parts.style.item(),
        g_semantic=parts.semantic.item(),
        g_fm=parts.fm.item(),
        g_total=g_total.item(),
    )
