import os

import pytest

from exemplar_synth.config import toy_config
from exemplar_synth.corpus import Split, ToyLabeler, generate_toy_corpus
from exemplar_synth.eval import evaluate
from exemplar_synth.sampler import (
    sample_consistent_pairs,
    sample_guidance_pairs,
    sample_inconsistent_pairs,
)
from exemplar_synth.settings import exemplar_synth_settings
from exemplar_synth.trainer import train

# Hours on cpu, so only run on request
pytestmark = [
    pytest.mark.slow,
    pytest.mark.skipif(
        not os.environ.get("EXEMPLAR_SYNTH_RUN_SLOW"),
        reason="set EXEMPLAR_SYNTH_RUN_SLOW=1 to run the toy end-to-end experiment",
    ),
]


def test_toy_end_to_end(tmp_path):
    config = toy_config()
    assert config.image_size == (64, 64)
    assert (config.toy.n_styles, config.toy.n_images_per_style) == (4, 200)
    assert (config.phases.n_warmup, config.phases.n_scadv, config.phases.n_decay) == (
        2_000,
        2_000,
        4_000,
    )
    assert config.batch_size == 1

    corpus = generate_toy_corpus(config.toy)
    train_corpus = corpus.subset(Split.TRAIN)
    pairs = [
        *sample_consistent_pairs(train_corpus, config.sampler, config.sampler.n_consistent),
        *sample_inconsistent_pairs(train_corpus, config.sampler, config.sampler.n_inconsistent),
        *sample_guidance_pairs(train_corpus, config.sampler),
    ]

    settings = {**exemplar_synth_settings(), "DEVICE": "auto"}
    result = train(config, train_corpus, pairs, tmp_path / "train", settings=settings)
    assert result.iteration == config.phases.total

    report = evaluate(
        config,
        corpus,
        result.checkpoint,
        labeler=ToyLabeler(),
        settings=settings,
    )
    assert report.n_samples == 100
    assert report.style_win_rate is not None
    assert report.style_win_rate >= 0.8
    assert report.mask_iou is not None
    assert report.mask_iou >= 0.7
