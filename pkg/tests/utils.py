import pathlib

import torch
from torch import nn

from exemplar_synth.losses.perceptual import PerceptualExtractor

SNAPSHOTS_DIR = pathlib.Path(__file__).parent / "snapshots"


def make_small_extractor(seed: int = 0) -> PerceptualExtractor:
    """Two-tap extractor small enough for cpu tests."""
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        backbone = nn.Sequential(
            nn.Conv2d(3, 4, 3, padding=1),
            nn.ReLU(),
            nn.AvgPool2d(2),
            nn.Conv2d(4, 6, 3, padding=1),
            nn.ReLU(),
        )
    return PerceptualExtractor(backbone, [1, 4], in_channels=3, source="small")
