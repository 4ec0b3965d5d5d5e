from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import torch
from torch import nn

if TYPE_CHECKING:
    from .state import NetworkState

logger = logging.getLogger(__name__)

INIT_MEAN = 0.0
INIT_STD = 0.02

_CONV_TYPES = (nn.Conv2d, nn.ConvTranspose2d)


@torch.no_grad()
def init_module_weights(
    module: nn.Module,
    generator: torch.Generator,
    mean: float = INIT_MEAN,
    std: float = INIT_STD,
):
    """Draw every convolution weight from N(mean, std²) and zero the biases.

    Weights are drawn on the CPU from `generator` in module order, so the result
    does not depend on the device the module lives on.
    """
    for m in module.modules():
        if not isinstance(m, _CONV_TYPES):
            continue
        weight = torch.randn(m.weight.shape, generator=generator, dtype=torch.float32)
        m.weight.copy_(weight * std + mean)
        if m.bias is not None:
            m.bias.zero_()


def init_weights(
    state: NetworkState,
    mean: float = INIT_MEAN,
    std: float = INIT_STD,
) -> NetworkState:
    """Initialize G, D_R and D_SC, in that order, from the state's seed."""
    generator = torch.Generator().manual_seed(state.seed)
    for name, net in state.networks().items():
        init_module_weights(net, generator, mean, std)
        logger.debug("Initialized %s with N(%g, %g^2)", name, mean, std)

    return state
