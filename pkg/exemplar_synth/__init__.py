from . import corpus, eval, losses, networks, sampler, trainer
from .config import (
    TrainConfig,
    apply_overrides,
    config_hash,
    default_config,
    load_config,
    save_config,
    toy_config,
    validate_config,
)
from .exceptions import ExemplarSynthError
from .settings import exemplar_synth_settings
from .types import Image, ImageRef, LabelKind, LabelMap, TrainingSample

__all__ = [
    "ExemplarSynthError",
    "Image",
    "ImageRef",
    "LabelKind",
    "LabelMap",
    "TrainConfig",
    "TrainingSample",
    "apply_overrides",
    "config_hash",
    "corpus",
    "default_config",
    "eval",
    "exemplar_synth_settings",
    "load_config",
    "losses",
    "networks",
    "sampler",
    "save_config",
    "toy_config",
    "trainer",
    "validate_config",
]
