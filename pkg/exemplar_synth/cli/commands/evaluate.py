from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from exemplar_synth.cli.base import BaseCommand
from exemplar_synth.config import TrainConfig
from exemplar_synth.corpus.base import Corpus
from exemplar_synth.corpus.labelers import make_labeler
from exemplar_synth.eval.evaluate import evaluate


class Command(BaseCommand):
    name = "evaluate"
    help = "Score a checkpoint on held-out triples and append to the results ledger"

    def add_arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument("--checkpoint", type=Path, required=True, help="Trained checkpoint")
        parser.add_argument("--corpus", type=Path, required=True, help="Corpus directory")

    def handle(self, config: TrainConfig, **options: Any):
        corpus = Corpus.load(options["corpus"])
        report = evaluate(
            config,
            corpus,
            options["checkpoint"],
            labeler=make_labeler(corpus.label_kind, corpus.label_channels),
            settings=self.settings,
        )
        path = report.write(options["out"], self.settings["RESULTS_LEDGER"])
        self.write(str(path))
