from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from exemplar_synth.cli.base import BaseCommand, CommandError
from exemplar_synth.config import TrainConfig
from exemplar_synth.corpus.base import labels_from_array, read_label_array
from exemplar_synth.corpus.labelers import make_labeler
from exemplar_synth.exceptions import ShapeError
from exemplar_synth.networks.checkpoint import load_checkpoint
from exemplar_synth.networks.state import build_state, generator_forward
from exemplar_synth.settings import resolve_device
from exemplar_synth.types import Image, LabelMap

OUTPUT_NAME = "output.png"


class Command(BaseCommand):
    name = "infer"
    help = "Synthesize one image from a label map and an exemplar"

    def add_arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument("--checkpoint", type=Path, required=True, help="Trained checkpoint")
        parser.add_argument("--labels", type=Path, required=True, help="Label map x")
        parser.add_argument("--exemplar", type=Path, required=True, help="Exemplar image I")
        parser.add_argument(
            "--exemplar-labels",
            type=Path,
            help="Label map of the exemplar, for labelers that cannot label new images",
        )

    def _read_labels(self, config: TrainConfig, path: Path) -> LabelMap:
        array = read_label_array(path, config.label_kind, config.label_channels)
        return labels_from_array(array, config.label_kind, config.label_channels, name=str(path))

    def handle(self, config: TrainConfig, **options: Any):
        state = build_state(config, device=resolve_device(self.settings), initialize=False)
        load_checkpoint(state, options["checkpoint"])

        x = self._read_labels(config, options["labels"])
        exemplar = Image.from_png(options["exemplar"])
        for name, size in (("labels", x.size), ("exemplar", exemplar.size)):
            if size != tuple(config.image_size):
                raise ShapeError(name, f"spatial size {tuple(config.image_size)}", size)

        if options.get("exemplar_labels") is not None:
            exemplar_labels = self._read_labels(config, options["exemplar_labels"])
        else:
            labeler = make_labeler(config.label_kind, config.label_channels)
            if not labeler.can_relabel:
                raise CommandError(
                    f"--exemplar-labels is required for {config.label_kind.value} labels",
                )
            exemplar_labels = labeler(exemplar)

        out: Path = options["out"] / OUTPUT_NAME
        generator_forward(state, x, exemplar, exemplar_labels).to_png(out)
        self.write(str(out))
