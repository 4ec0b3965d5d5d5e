from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple, Union

import torch
from torch import nn

from exemplar_synth.config import config_hash
from exemplar_synth.types import Image, LabelMap

from .discriminator import DiscriminatorSpec, PatchDiscriminator
from .generator import Generator, GeneratorSpec
from .init import init_weights

if TYPE_CHECKING:
    from exemplar_synth.config import TrainConfig

#: Network names, in initialization and checkpoint order.
NETWORK_NAMES = ("G", "D_R", "D_SC")


@dataclasses.dataclass(eq=False)
class NetworkState:
    """Generator, both discriminators and their Adam optimizers.

    Attributes
    ----------
        iteration:
            Number of completed training steps
        seed:
            Seed used for initialization and the training stream
        config_hash:
            Hash of the config the networks were built from

    """

    generator: Generator
    d_real: PatchDiscriminator
    d_style: PatchDiscriminator
    opt_g: torch.optim.Adam
    opt_d_real: torch.optim.Adam
    opt_d_style: torch.optim.Adam
    iteration: int = 0
    seed: int = 0
    config_hash: str = ""

    def networks(self) -> Dict[str, nn.Module]:
        return dict(zip(NETWORK_NAMES, (self.generator, self.d_real, self.d_style)))

    def optimizers(self) -> Dict[str, torch.optim.Adam]:
        return dict(zip(NETWORK_NAMES, (self.opt_g, self.opt_d_real, self.opt_d_style)))

    @property
    def device(self) -> torch.device:
        return next(self.generator.parameters()).device


def build_state(
    config: TrainConfig,
    *,
    device: Optional[torch.device] = None,
    initialize: bool = True,
) -> NetworkState:
    """Build freshly initialized networks and optimizers for `config`."""
    generator = Generator(
        GeneratorSpec(
            label_channels=config.label_channels,
            base_width=config.generator.base_width,
            n_blocks=config.generator.n_blocks,
        ),
    )
    d_real = PatchDiscriminator(
        DiscriminatorSpec(
            in_channels=config.label_channels + 3,
            base_width=config.discriminator.base_width,
            normalization=config.discriminator.normalization,
        ),
    )
    d_style = PatchDiscriminator(
        DiscriminatorSpec(
            in_channels=6,
            base_width=config.discriminator.base_width,
            normalization=config.discriminator.normalization,
        ),
    )

    def adam(net: nn.Module) -> torch.optim.Adam:
        return torch.optim.Adam(net.parameters(), lr=config.base_lr, betas=config.betas)

    state = NetworkState(
        generator=generator,
        d_real=d_real,
        d_style=d_style,
        opt_g=adam(generator),
        opt_d_real=adam(d_real),
        opt_d_style=adam(d_style),
        seed=config.seed,
        config_hash=config_hash(config),
    )
    if initialize:
        init_weights(state)
    if device is not None:
        for net in state.networks().values():
            net.to(device)

    return state


def discriminate_real(
    state: NetworkState,
    x: torch.Tensor,
    image: torch.Tensor,
    *,
    return_features: bool = False,
) -> Union[torch.Tensor, Tuple[torch.Tensor, List[torch.Tensor]]]:
    """D_R(x, image): conditions on the label map only."""
    return state.d_real(torch.cat([x, image], dim=1), return_features=return_features)


def discriminate_style(
    state: NetworkState,
    exemplar: torch.Tensor,
    candidate: torch.Tensor,
) -> torch.Tensor:
    """D_SC(exemplar, candidate) on an ordered image pair."""
    return state.d_style(torch.cat([exemplar, candidate], dim=1))


@torch.no_grad()
def generator_forward(
    state: NetworkState,
    x: LabelMap,
    exemplar: Image,
    exemplar_labels: LabelMap,
) -> Image:
    """Synthesize one image with the semantics of `x` and the style of `exemplar`."""
    device = state.device
    output = state.generator(
        x.channels.unsqueeze(0).to(device),
        exemplar.pixels.unsqueeze(0).to(device),
        exemplar_labels.channels.unsqueeze(0).to(device),
    )
    return Image(output[0].cpu())
