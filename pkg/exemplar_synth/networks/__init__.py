from .checkpoint import (
    CheckpointHeader,
    load_checkpoint,
    read_records,
    save_checkpoint,
    write_records,
)
from .discriminator import DiscriminatorSpec, PatchDiscriminator
from .generator import Generator, GeneratorSpec
from .init import init_module_weights, init_weights
from .state import (
    NetworkState,
    build_state,
    discriminate_real,
    discriminate_style,
    generator_forward,
)

__all__ = [
    "CheckpointHeader",
    "DiscriminatorSpec",
    "Generator",
    "GeneratorSpec",
    "NetworkState",
    "PatchDiscriminator",
    "build_state",
    "discriminate_real",
    "discriminate_style",
    "generator_forward",
    "init_module_weights",
    "init_weights",
    "load_checkpoint",
    "read_records",
    "save_checkpoint",
    "write_records",
]
