"""PNG and array conversion helpers shared by the corpus, the trainer and the CLI.

Pixel convention: uint8 [0, 255] on disk, float [-1, 1] in memory, mapped linearly.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import torch
from PIL import Image as PILImage

if TYPE_CHECKING:
    from .typing import PathLike


def uint8_to_unit(array: np.ndarray) -> torch.Tensor:
    """Convert an H×W×3 uint8 array to a 3×H×W float tensor in [-1, 1]."""
    tensor = torch.from_numpy(np.ascontiguousarray(array)).permute(2, 0, 1)
    return tensor.to(torch.float32) / 127.5 - 1.0


def unit_to_uint8(tensor: torch.Tensor) -> np.ndarray:
    """Convert a 3×H×W tensor in [-1, 1] to an H×W×3 uint8 array."""
    scaled = (tensor.detach().cpu().clamp(-1.0, 1.0) + 1.0) * 127.5
    return scaled.round().to(torch.uint8).permute(1, 2, 0).numpy()


def read_rgb_png(path: PathLike) -> np.ndarray:
    with PILImage.open(path) as img:
        if img.mode not in {"RGB", "L", "P"}:
            raise ValueError(f"{path}: unsupported PNG mode {img.mode!r}")
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def read_gray_png(path: PathLike) -> np.ndarray:
    with PILImage.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)


def write_png(path: PathLike, array: np.ndarray):
    mode = "L" if array.ndim == 2 else "RGB"
    PILImage.fromarray(np.ascontiguousarray(array), mode=mode).save(
        path,
        format="PNG",
    )


def label_to_rgb(channels: torch.Tensor) -> torch.Tensor:
    """Render a C×H×W label tensor as a 3×H×W image in [-1, 1] for grids."""
    n_channels = channels.shape[0]
    if n_channels == 3:
        return channels * 2.0 - 1.0
    if n_channels == 1:
        return channels.repeat(3, 1, 1) * 2.0 - 1.0

    # one gray level per class
    levels = channels.argmax(dim=0).to(torch.float32) / max(n_channels - 1, 1)
    return levels.unsqueeze(0).repeat(3, 1, 1) * 2.0 - 1.0
