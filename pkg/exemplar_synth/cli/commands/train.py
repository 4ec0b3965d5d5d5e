from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from exemplar_synth.cli.base import BaseCommand
from exemplar_synth.config import TrainConfig
from exemplar_synth.corpus.base import Corpus, Split
from exemplar_synth.sampler import read_pairs
from exemplar_synth.trainer.loop import train


class Command(BaseCommand):
    name = "train"
    help = "Train the generator and both discriminators"

    def add_arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument("--corpus", type=Path, required=True, help="Corpus directory")
        parser.add_argument("--pairs", type=Path, required=True, help="Pair manifest")
        parser.add_argument("--checkpoint", type=Path, help="Checkpoint to resume from")
        parser.add_argument("--until", type=int, help="Stop at this iteration")

    def handle(self, config: TrainConfig, **options: Any):
        result = train(
            config,
            Corpus.load(options["corpus"]).subset(Split.TRAIN),
            read_pairs(options["pairs"]),
            options["out"],
            resume=options.get("checkpoint"),
            until=options.get("until"),
            settings=self.settings,
        )
        self.write(f"iteration {result.iteration}: {result.checkpoint}")
