import dataclasses

import pytest

from exemplar_synth.config import (
    DiscriminatorConfig,
    EvalConfig,
    GeneratorConfig,
    PerceptualConfig,
    PhaseIterations,
    SamplerConfig,
    ToyCorpusSpec,
    TrainConfig,
    toy_config,
)
from exemplar_synth.corpus.toy import generate_toy_corpus
from exemplar_synth.settings import exemplar_synth_settings
from tests.utils import make_small_extractor


@pytest.fixture(autouse=True)
def _isolate_settings(monkeypatch):
    monkeypatch.setenv("EXEMPLAR_SYNTH_DEVICE", "cpu")
    monkeypatch.setenv("EXEMPLAR_SYNTH_PROGRESS_BAR", "false")


@pytest.fixture()
def settings():
    return exemplar_synth_settings()


@pytest.fixture()
def tiny_config() -> TrainConfig:
    """Toy config shrunk until a full training run takes a few seconds on cpu."""
    return dataclasses.replace(
        toy_config(),
        image_size=(32, 32),
        phases=PhaseIterations(n_warmup=2, n_scadv=2, n_decay=4),
        generator=GeneratorConfig(base_width=4, n_blocks=1),
        discriminator=DiscriminatorConfig(base_width=4),
        perceptual=PerceptualConfig(layers=("relu1_2",)),
        sampler=SamplerConfig(guidance_per_label=2, n_consistent=8, n_inconsistent=8),
        toy=ToyCorpusSpec(
            n_styles=3,
            n_images_per_style=6,
            n_holdout_per_style=2,
            image_size=(32, 32),
        ),
        eval=EvalConfig(n_triples=4, fid_layer=0, patch_size=16),
        checkpoint_every=4,
        sample_every=4,
        probe_count=2,
    )


@pytest.fixture()
def toy_corpus(tiny_config):
    return generate_toy_corpus(tiny_config.toy)


@pytest.fixture()
def small_extractor():
    return make_small_extractor()
