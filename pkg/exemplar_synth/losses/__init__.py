from .adversarial import (
    check_finite,
    lsgan_d_loss,
    lsgan_g_loss,
    require_style_pairs,
    style_adv_losses,
    style_d_loss,
    style_g_loss,
)
from .objective import GeneratorLossParts, feature_matching_loss, total_generator_loss
from .perceptual import (
    VGG16_TAPS,
    AdaptiveWeights,
    PerceptualExtractor,
    StyleRegime,
    adaptive_semantic_loss,
)

__all__ = [
    "VGG16_TAPS",
    "AdaptiveWeights",
    "GeneratorLossParts",
    "PerceptualExtractor",
    "StyleRegime",
    "adaptive_semantic_loss",
    "check_finite",
    "feature_matching_loss",
    "lsgan_d_loss",
    "lsgan_g_loss",
    "require_style_pairs",
    "style_adv_losses",
    "style_d_loss",
    "style_g_loss",
    "total_generator_loss",
]
