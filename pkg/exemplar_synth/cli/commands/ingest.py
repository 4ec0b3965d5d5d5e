from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from exemplar_synth.cli.base import BaseCommand
from exemplar_synth.config import TrainConfig
from exemplar_synth.corpus.base import write_rejects
from exemplar_synth.corpus.ingest import ingest_frames

REJECTS_NAME = "rejects.tsv"


class Command(BaseCommand):
    name = "ingest"
    help = "Build a corpus from pre-extracted frames and label files"

    def add_arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument(
            "--frames",
            type=Path,
            required=True,
            help="Directory of <video>/<frame>.png folders",
        )
        parser.add_argument(
            "--label-dir",
            type=Path,
            required=True,
            help="Directory mirroring --frames with label files",
        )
        parser.add_argument(
            "--groups",
            type=Path,
            help="CSV mapping videos (or frames) to style groups or attributes",
        )

    def handle(self, config: TrainConfig, **options: Any):
        corpus = ingest_frames(
            options["frames"],
            options["label_dir"],
            label_kind=config.label_kind,
            label_channels=config.label_channels,
            group_table=options.get("groups"),
        )
        out: Path = options["out"]
        manifest = corpus.write(out)
        write_rejects(corpus.rejects, out / REJECTS_NAME)
        self.write(f"{len(corpus)} images in {manifest}, {len(corpus.rejects)} rejected")
