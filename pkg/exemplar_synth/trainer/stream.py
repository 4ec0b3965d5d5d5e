from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple

import numpy as np
import torch

from exemplar_synth.exceptions import ConfigurationError
from exemplar_synth.sampler import PairRecord, make_training_sample
from exemplar_synth.types import TrainingSample, stack_images, stack_labels

if TYPE_CHECKING:
    from exemplar_synth.config import TrainConfig
    from exemplar_synth.corpus.base import Corpus

logger = logging.getLogger(__name__)

TensorPair = Tuple[torch.Tensor, torch.Tensor]


@dataclasses.dataclass
class StepBatch:
    """Everything one training step consumes, as batched tensors.

    `consistent_pair` and `inconsistent_pair` are the D_SC data pairs; they are
    `None` only when the style-consistency loss is disabled for the whole run.
    """

    x: torch.Tensor
    z: torch.Tensor
    exemplar: torch.Tensor
    exemplar_labels: torch.Tensor
    style_consistent: torch.Tensor
    consistent_pair: Optional[TensorPair] = None
    inconsistent_pair: Optional[TensorPair] = None

    def to(self, device: torch.device) -> StepBatch:
        def move(pair: Optional[TensorPair]) -> Optional[TensorPair]:
            return None if pair is None else (pair[0].to(device), pair[1].to(device))

        return StepBatch(
            x=self.x.to(device),
            z=self.z.to(device),
            exemplar=self.exemplar.to(device),
            exemplar_labels=self.exemplar_labels.to(device),
            style_consistent=self.style_consistent.to(device),
            consistent_pair=move(self.consistent_pair),
            inconsistent_pair=move(self.inconsistent_pair),
        )


class TrainingStream:
    """Deterministic source of training batches.

    The batch of an iteration depends on `(seed, iteration)` only, so a resumed
    run sees exactly the batches an uninterrupted one would. Generator samples
    alternate between the consistent and the inconsistent pool, each pair's
    members are swapped with probability 1/2, and D_SC data pairs are drawn
    independently of the generator sample.
    """

    def __init__(
        self,
        corpus: Corpus,
        pairs: Sequence[PairRecord],
        config: TrainConfig,
    ):
        self.corpus = corpus
        self.batch_size = config.batch_size
        self.seed = config.seed
        self.consistent = [p for p in pairs if p.consistent]
        self.inconsistent = [p for p in pairs if not p.consistent]
        self.with_style_pairs = config.loss_weights.scadv_enabled

        if self.with_style_pairs:
            for kind, pool in (("consistent", self.consistent), ("inconsistent", self.inconsistent)):
                if not pool:
                    raise ConfigurationError(
                        f"Pair manifest has no style-{kind} pairs; D_SC cannot train",
                        suggestion="Re-run sample-pairs, or set loss_weights.scadv_enabled = false",
                    )
        elif not pairs:
            raise ConfigurationError("Pair manifest is empty")

        logger.info(
            "Training stream: %d consistent and %d inconsistent pairs",
            len(self.consistent),
            len(self.inconsistent),
        )

    def _pool(self, consistent: bool) -> List[PairRecord]:
        pool = self.consistent if consistent else self.inconsistent
        # Fall back to the other pool when style pairs are off and one is empty
        return pool or self.inconsistent or self.consistent

    def _draw(self, rng: np.random.Generator, consistent: bool) -> TrainingSample:
        pool = self._pool(consistent)
        record = pool[int(rng.integers(len(pool)))]
        return make_training_sample(self.corpus, record, swap=bool(rng.random() < 0.5))

    def _pair(self, rng: np.random.Generator, consistent: bool) -> List[TrainingSample]:
        return [self._draw(rng, consistent) for _ in range(self.batch_size)]

    def batch(self, iteration: int) -> StepBatch:
        rng = np.random.default_rng([self.seed, iteration])
        start = iteration * self.batch_size
        samples = [self._draw(rng, (start + k) % 2 == 0) for k in range(self.batch_size)]

        batch = StepBatch(
            x=stack_labels([s.x for s in samples]),
            z=stack_images([s.z for s in samples]),
            exemplar=stack_images([s.exemplar for s in samples]),
            exemplar_labels=stack_labels([s.exemplar_labels for s in samples]),
            style_consistent=torch.tensor([s.style_consistent for s in samples]),
        )
        if self.with_style_pairs:
            for name, consistent in (("consistent_pair", True), ("inconsistent_pair", False)):
                pair = self._pair(rng, consistent)
                setattr(
                    batch,
                    name,
                    (stack_images([s.z for s in pair]), stack_images([s.exemplar for s in pair])),
                )

        return batch

    def probes(self, count: int) -> List[TrainingSample]:
        """A fixed set of samples, shown in the periodic image grids."""
        rng = np.random.default_rng([self.seed])
        return [self._draw(rng, k % 2 == 0) for k in range(count)]
