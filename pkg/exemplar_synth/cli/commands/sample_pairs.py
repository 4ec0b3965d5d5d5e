from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Any, List

from exemplar_synth.cli.base import BaseCommand
from exemplar_synth.config import TrainConfig
from exemplar_synth.corpus.base import Corpus, Split, write_rejects
from exemplar_synth.sampler import (
    PairRecord,
    apply_human_labels,
    sample_consistent_pairs,
    sample_guidance_pairs,
    sample_inconsistent_pairs,
    write_pairs,
)

logger = logging.getLogger(__name__)

PAIRS_NAME = "pairs.tsv"
REJECTS_NAME = "rejects.tsv"


class Command(BaseCommand):
    name = "sample-pairs"
    help = "Sample style-consistent, style-inconsistent and guidance pairs"

    def add_arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument("--corpus", type=Path, required=True, help="Corpus directory")
        parser.add_argument(
            "--human-labels",
            type=Path,
            help="TSV of ref_a, ref_b, verdict relabeling cross-group pairs",
        )

    def handle(self, config: TrainConfig, **options: Any):
        corpus = Corpus.load(options["corpus"]).subset(Split.TRAIN)
        sampler = config.sampler

        pairs: List[PairRecord] = []
        if sampler.n_consistent:
            pairs += sample_consistent_pairs(corpus, sampler, sampler.n_consistent)
        if sampler.n_inconsistent:
            pairs += sample_inconsistent_pairs(corpus, sampler, sampler.n_inconsistent)
        pairs += sample_guidance_pairs(corpus, sampler)

        rejects = []
        if options.get("human_labels") is not None:
            pairs, rejects = apply_human_labels(pairs, options["human_labels"])

        out: Path = options["out"]
        write_pairs(pairs, out / PAIRS_NAME)
        write_rejects(rejects, out / REJECTS_NAME)

        n_consistent = sum(p.consistent for p in pairs)
        logger.info("Sampled %d consistent and %d inconsistent pairs", n_consistent, len(pairs) - n_consistent)
        self.write(f"{len(pairs)} pairs in {out / PAIRS_NAME}")
