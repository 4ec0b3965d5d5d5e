from __future__ import annotations

from typing import Any

from exemplar_synth.cli.base import BaseCommand
from exemplar_synth.config import TrainConfig, toy_config
from exemplar_synth.corpus.toy import generate_toy_corpus


class Command(BaseCommand):
    name = "gen-toy"
    help = "Render the synthetic shapes-with-palettes corpus"

    def base_config(self) -> TrainConfig:
        return toy_config()

    def handle(self, config: TrainConfig, **options: Any):
        corpus = generate_toy_corpus(config.toy)
        manifest = corpus.write(options["out"])
        self.write(f"{len(corpus)} images in {manifest}")
