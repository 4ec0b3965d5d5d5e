"""Deterministic shapes-with-palettes corpus.

A toy style is a (foreground, background) color pair; toy semantics are the shape
mask. Both are exactly known, which makes style and semantic consistency directly
measurable on synthesized outputs.
"""

from __future__ import annotations

import colorsys
import dataclasses
import logging
import math
from typing import TYPE_CHECKING, List, Tuple

import numpy as np
import torch
from PIL import Image as PILImage
from PIL import ImageDraw

from exemplar_synth.config import TOY_SHAPES, ToyCorpusSpec
from exemplar_synth.exceptions import CorpusError
from exemplar_synth.types import Image, LabelKind, LabelMap, check_spatial_size

from .base import Corpus, CorpusEntry, PairingMode, Split

if TYPE_CHECKING:
    from exemplar_synth.utils.typing import RGB, Size2D

__all__ = [
    "TOY_THRESHOLD",
    "StyleDistance",
    "ToyPalette",
    "foreground_color",
    "generate_toy_corpus",
    "render_shape_mask",
    "render_toy_image",
    "toy_label",
    "toy_palettes",
    "toy_style_distance",
]

logger = logging.getLogger(__name__)

#: Minimum Euclidean distance, in [-1, 1] pixel units, from the background
#: color for a pixel to count as foreground.
TOY_THRESHOLD = 0.5

_FG_SATURATION, _FG_VALUE = 0.85, 0.95
_BG_SATURATION, _BG_VALUE = 0.5, 0.2


@dataclasses.dataclass(frozen=True)
class ToyPalette:
    """Colors of one toy style, as RGB in [0, 1]."""

    foreground: RGB
    background: RGB


def toy_palettes(spec: ToyCorpusSpec) -> List[ToyPalette]:
    """Evenly spaced foreground hues with a seed-dependent phase.

    Backgrounds are dark and sit opposite their foreground on the hue wheel.
    """
    palette_seed, _ = np.random.SeedSequence(spec.seed).spawn(2)
    phase = float(np.random.default_rng(palette_seed).random())

    palettes = []
    for k in range(spec.n_styles):
        hue = (phase + k / spec.n_styles) % 1.0
        palettes.append(
            ToyPalette(
                foreground=colorsys.hsv_to_rgb(hue, _FG_SATURATION, _FG_VALUE),
                background=colorsys.hsv_to_rgb((hue + 0.5) % 1.0, _BG_SATURATION, _BG_VALUE),
            ),
        )

    return palettes


def render_shape_mask(shape: str, size: Size2D, rng: np.random.Generator) -> np.ndarray:
    """Draw one filled shape at a random position, clear of the image border."""
    if shape not in TOY_SHAPES:
        raise CorpusError(f"Unknown toy shape {shape!r}")

    height, width = size
    short = min(height, width)
    margin = max(2, short // 8)
    radius = float(rng.uniform(short / 6, short / 3))
    cx = float(rng.uniform(margin + radius, width - margin - radius))
    cy = float(rng.uniform(margin + radius, height - margin - radius))

    canvas = PILImage.new("L", (width, height), 0)
    draw = ImageDraw.Draw(canvas)
    if shape == "circle":
        draw.ellipse((cx - radius, cy - radius, cx + radius, cy + radius), fill=255)
    elif shape == "square":
        half = radius / math.sqrt(2)
        draw.rectangle((cx - half, cy - half, cx + half, cy + half), fill=255)
    else:
        start = float(rng.uniform(0, 2 * math.pi))
        corners = [
            (cx + radius * math.cos(start + k * 2 * math.pi / 3),
             cy + radius * math.sin(start + k * 2 * math.pi / 3))
            for k in range(3)
        ]
        draw.polygon(corners, fill=255)

    return np.asarray(canvas) > 127


def render_toy_image(
    mask: np.ndarray,
    palette: ToyPalette,
    noise_std: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Paint `mask` in the palette colors and add Gaussian noise; returns uint8 H×W×3."""
    fg = np.asarray(palette.foreground, dtype=np.float64)
    bg = np.asarray(palette.background, dtype=np.float64)
    pixels = np.where(mask[:, :, None], fg, bg)
    if noise_std > 0:
        pixels += rng.normal(0.0, noise_std, size=pixels.shape)

    return np.round(np.clip(pixels, 0.0, 1.0) * 255.0).astype(np.uint8)


def generate_toy_corpus(spec: ToyCorpusSpec) -> Corpus:
    """Render the toy corpus described by `spec`.

    Each style becomes one synthetic video (`style-XX`) and one style group. The
    first `n_images_per_style` frames of a style are the training split and the
    following `n_holdout_per_style` frames the test split.
    """
    if spec.n_styles < 2:
        raise CorpusError(
            f"Toy corpus needs at least 2 styles, got {spec.n_styles}",
            suggestion="Style-inconsistent pairs need two styles to exist",
        )
    if spec.n_images_per_style < 1:
        raise CorpusError("Toy corpus needs at least one image per style")
    check_spatial_size(spec.image_size, "toy.image_size")

    _, shape_seed = np.random.SeedSequence(spec.seed).spawn(2)
    rng = np.random.default_rng(shape_seed)
    palettes = toy_palettes(spec)

    entries = []
    arrays = {}
    n_frames = spec.n_images_per_style + spec.n_holdout_per_style
    for style, palette in enumerate(palettes):
        video_id = f"style-{style:02d}"
        for frame in range(n_frames):
            shape = spec.shapes[int(rng.integers(len(spec.shapes)))]
            mask = render_shape_mask(shape, spec.image_size, rng)
            image = render_toy_image(mask, palette, spec.noise_std, rng)

            stem = f"{style}/{video_id}/{frame:06d}"
            entry = CorpusEntry(
                video_id=video_id,
                frame_index=frame,
                group_id=style,
                image_path=f"images/{stem}.png",
                label_path=f"labels/{stem}.png",
                split=Split.TRAIN if frame < spec.n_images_per_style else Split.TEST,
            )
            arrays[entry.image_path] = image
            arrays[entry.label_path] = mask.astype(np.uint8) * 255
            entries.append(entry)

    logger.info(
        "Generated toy corpus: %d styles x %d images (+%d held out), seed %d",
        spec.n_styles,
        spec.n_images_per_style,
        spec.n_holdout_per_style,
        spec.seed,
    )
    return Corpus(
        entries,
        label_kind=LabelKind.TOY_MASK,
        label_channels=1,
        pairing=PairingMode.GROUP,
        arrays=arrays,
    )


def _border_color(pixels: torch.Tensor) -> torch.Tensor:
    border = torch.cat(
        [pixels[:, 0, :], pixels[:, -1, :], pixels[:, :, 0], pixels[:, :, -1]],
        dim=1,
    )
    return border.median(dim=1).values


def toy_label(image: Image, threshold: float = TOY_THRESHOLD) -> LabelMap:
    """Foreground mask: pixels farther than `threshold` from the border color."""
    pixels = image.pixels
    background = _border_color(pixels)
    distance = (pixels - background[:, None, None]).norm(dim=0)
    mask = (distance > threshold).to(torch.float32)
    return LabelMap(mask.unsqueeze(0), LabelKind.TOY_MASK)


def foreground_color(image: Image) -> Tuple[torch.Tensor, bool]:
    """Estimate the foreground palette color as RGB in [0, 1].

    Returns the color and whether the estimate fell back to the background color
    because no foreground pixel was found.
    """
    pixels = (image.pixels.to(torch.float64) + 1.0) / 2.0
    mask = toy_label(image).channels[0].bool()
    if not mask.any():
        return _border_color(pixels), True

    return pixels[:, mask].mean(dim=1), False


@dataclasses.dataclass(frozen=True)
class StyleDistance:
    """Distance between two foreground palette estimates.

    `background_fallback` is set when either image had no foreground and its
    background color was used instead.
    """

    distance: float
    background_fallback: bool = False

    def __float__(self) -> float:
        return self.distance


def toy_style_distance(a: Image, b: Image) -> StyleDistance:
    """Euclidean distance between foreground colors, in [0, 1] RGB units."""
    color_a, fallback_a = foreground_color(a)
    color_b, fallback_b = foreground_color(b)
    return StyleDistance(
        distance=float((color_a - color_b).norm()),
        background_fallback=fallback_a or fallback_b,
    )
