from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING, Dict, List, Optional

import numpy as np
import torch
from tqdm import tqdm

from exemplar_synth.config import config_hash, ensure_valid
from exemplar_synth.corpus.base import Split
from exemplar_synth.corpus.toy import toy_label, toy_style_distance
from exemplar_synth.exceptions import EmptyDomainError, MetricError
from exemplar_synth.losses.perceptual import PerceptualExtractor
from exemplar_synth.networks.checkpoint import load_checkpoint
from exemplar_synth.networks.state import NetworkState, build_state, generator_forward
from exemplar_synth.sampler import EVAL_STREAM, style_codes
from exemplar_synth.settings import exemplar_synth_settings, resolve_device
from exemplar_synth.types import LabelKind

from .metrics import (
    center_box,
    fid,
    label_endpoint_error,
    mask_centroid,
    mask_iou,
    patch_style_distance,
    segmentation_scores,
)
from .report import MetricReport

if TYPE_CHECKING:
    from exemplar_synth.config import TrainConfig
    from exemplar_synth.corpus.base import Corpus
    from exemplar_synth.corpus.labelers import Labeler
    from exemplar_synth.settings import ExemplarSynthSettings
    from exemplar_synth.types import Image, ImageRef, LabelMap
    from exemplar_synth.utils.typing import PathLike

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True, eq=False)
class EvalTriple:
    """A held-out (x, I) input with its ground truth z.

    `other` is an exemplar of a style different from I's, the reference the
    toy style win rate compares against.
    """

    z_ref: ImageRef
    exemplar_ref: ImageRef
    other_ref: ImageRef
    x: LabelMap
    z: Image
    exemplar: Image
    exemplar_labels: LabelMap
    other: Image


def held_out_triples(corpus: Corpus, config: TrainConfig) -> List[EvalTriple]:
    """Draw `config.eval.n_triples` style-inconsistent triples from the test split.

    Falls back to the whole corpus when it has no test split.
    """
    pool = corpus.subset(Split.TEST)
    if not len(pool):
        logger.warning("Corpus has no test split; evaluating on training images")
        pool = corpus

    codes = style_codes(pool)
    if len(np.unique(codes)) < 2:
        raise EmptyDomainError("evaluation triples need at least 2 styles")

    rng = np.random.default_rng([config.sampler.seed, EVAL_STREAM])
    entries = pool.entries
    triples = []
    for _ in range(config.eval.n_triples):
        i = int(rng.integers(len(entries)))
        j = int(rng.choice(np.flatnonzero(codes != codes[i])))
        k = int(rng.choice(np.flatnonzero(codes != codes[j])))
        z, exemplar, other = entries[i], entries[j], entries[k]
        triples.append(
            EvalTriple(
                z_ref=z.ref,
                exemplar_ref=exemplar.ref,
                other_ref=other.ref,
                x=pool.labels(z),
                z=pool.image(z),
                exemplar=pool.image(exemplar),
                exemplar_labels=pool.labels(exemplar),
                other=pool.image(other),
            ),
        )

    return triples


@torch.no_grad()
def pooled_features(extractor: PerceptualExtractor, image: Image, layer: int) -> np.ndarray:
    """Spatially averaged features of one tap, the vectors FID is fitted on."""
    pixels = image.pixels.unsqueeze(0).to(extractor.mean.device)
    return extractor(pixels)[layer][0].mean(dim=(1, 2)).to(torch.float64).cpu().numpy()


def _class_map(labels: LabelMap) -> np.ndarray:
    if labels.kind is LabelKind.TOY_MASK:
        return (labels.channels[0] >= 0.5).to(torch.int64).numpy()
    return labels.channels.argmax(dim=0).numpy()


def evaluate(
    config: TrainConfig,
    corpus: Corpus,
    checkpoint: PathLike,
    *,
    labeler: Labeler,
    extractor: Optional[PerceptualExtractor] = None,
    settings: Optional[ExemplarSynthSettings] = None,
) -> MetricReport:
    """Synthesize the held-out triples with a trained generator and score them.

    Outputs are relabeled with `labeler` for the label endpoint error and the
    segmentation scores; both are skipped when it cannot label new images.
    """
    ensure_valid(config)
    corpus.ensure_fits(config)
    settings = settings or exemplar_synth_settings()
    state = build_state(config, device=resolve_device(settings), initialize=False)
    load_checkpoint(state, checkpoint)

    if extractor is None:
        extractor = PerceptualExtractor.vgg16(
            config.perceptual.layers,
            config.perceptual.weights_path,
            config.perceptual.seed,
        )
    extractor = extractor.to(state.device)

    triples = held_out_triples(corpus, config)
    return score_triples(
        state,
        triples,
        config=config,
        labeler=labeler,
        extractor=extractor,
        progress=settings["PROGRESS_BAR"],
    )


def score_triples(
    state: NetworkState,
    triples: List[EvalTriple],
    *,
    config: TrainConfig,
    labeler: Labeler,
    extractor: PerceptualExtractor,
    progress: bool = False,
) -> MetricReport:
    skipped: Dict[str, str] = {}
    toy = config.label_kind is LabelKind.TOY_MASK
    relabel = labeler.can_relabel
    if not relabel:
        reason = "labeler cannot label synthesized images"
        skipped.update(lepe=reason, seg=reason)
    elif not toy:
        skipped["lepe"] = f"no point extraction for {config.label_kind.value} labels"
    if not toy:
        reason = "toy corpora only"
        skipped.update(style_win_rate=reason, mask_iou=reason)

    real_features, fake_features = [], []
    lepe, pred_maps, gt_maps, patch, wins, ious = [], [], [], [], [], []
    no_centroid = 0
    for triple in tqdm(triples, desc="evaluate", disable=not progress):
        output = generator_forward(state, triple.x, triple.exemplar, triple.exemplar_labels)
        real_features.append(pooled_features(extractor, triple.z, config.eval.fid_layer))
        fake_features.append(pooled_features(extractor, output, config.eval.fid_layer))

        box = center_box(output.size, config.eval.patch_size)
        patch.append(patch_style_distance(extractor, output, triple.exemplar, box, box))

        if relabel:
            relabeled = labeler(output)
            pred_maps.append(_class_map(relabeled))
            gt_maps.append(_class_map(triple.x))
            if toy:
                pred_point, gt_point = mask_centroid(relabeled), mask_centroid(triple.x)
                if pred_point is None or gt_point is None:
                    no_centroid += 1
                else:
                    lepe.append(label_endpoint_error([pred_point], [gt_point], output.size))

        if toy:
            wins.append(
                float(toy_style_distance(output, triple.exemplar))
                < float(toy_style_distance(output, triple.other)),
            )
            ious.append(mask_iou(toy_label(output), triple.x))

    fid_value = None
    try:
        fid_value = fid(np.stack(real_features), np.stack(fake_features))
    except MetricError as e:
        skipped["fid"] = e.message

    if no_centroid:
        logger.warning("%d triple(s) had an empty mask and were left out of lepe", no_centroid)
    if toy and relabel and not lepe:
        skipped["lepe"] = "every relabeled mask was empty"

    seg = None
    if pred_maps:
        n_classes = 2 if toy else config.label_channels
        seg = segmentation_scores(np.stack(pred_maps), np.stack(gt_maps), n_classes).as_tuple()

    report = MetricReport(
        n_samples=len(triples),
        config_hash=config_hash(config),
        backbone=extractor.source,
        fid=fid_value,
        lepe=float(np.mean(lepe)) if lepe else None,
        seg=seg,
        patch_dist=float(np.mean(patch)) if patch else None,
        style_win_rate=float(np.mean(wins)) if wins else None,
        mask_iou=float(np.mean(ious)) if ious else None,
        skipped=skipped,
    )
    logger.info(
        "Evaluated %d triples: fid=%s style_win_rate=%s mask_iou=%s",
        report.n_samples,
        report.fid,
        report.style_win_rate,
        report.mask_iou,
    )
    return report
