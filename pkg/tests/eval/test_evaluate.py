import dataclasses

import pytest

from exemplar_synth.config import EvalConfig
from exemplar_synth.corpus import PrecomputedLabeler, Split, ToyLabeler
from exemplar_synth.eval import evaluate, held_out_triples
from exemplar_synth.exceptions import (
    ConfigHashMismatchError,
    ConfigurationError,
    EmptyDomainError,
)
from exemplar_synth.networks import build_state, save_checkpoint
from exemplar_synth.types import LabelKind
from tests.factories import video_corpus


@pytest.fixture()
def checkpoint(tiny_config, tmp_path):
    return save_checkpoint(build_state(tiny_config), tmp_path / "model.ckpt")


def test_held_out_triples(toy_corpus, tiny_config):
    triples = held_out_triples(toy_corpus, tiny_config)
    assert len(triples) == tiny_config.eval.n_triples
    for t in triples:
        assert t.z_ref.group_id != t.exemplar_ref.group_id
        assert t.other_ref.group_id != t.exemplar_ref.group_id
        for ref in (t.z_ref, t.exemplar_ref, t.other_ref):
            assert toy_corpus.entry(ref).split is Split.TEST

    again = held_out_triples(toy_corpus, tiny_config)
    assert [t.z_ref for t in again] == [t.z_ref for t in triples]


def test_held_out_triples_need_two_styles(tiny_config):
    with pytest.raises(EmptyDomainError, match="2 styles"):
        held_out_triples(video_corpus(1, 4), tiny_config)


def test_evaluate_toy(toy_corpus, tiny_config, checkpoint, small_extractor):
    report = evaluate(
        tiny_config,
        toy_corpus,
        checkpoint,
        labeler=ToyLabeler(),
        extractor=small_extractor,
    )
    assert report.n_samples == 4
    assert report.backbone == "small"
    assert report.config_hash == build_state(tiny_config).config_hash
    # 4 triples cannot fit 4-d features
    assert report.fid is None
    assert "at least 5 vectors" in report.skipped["fid"]
    assert report.seg is not None
    assert report.patch_dist is not None
    assert 0.0 <= report.style_win_rate <= 1.0
    assert 0.0 <= report.mask_iou <= 1.0
    assert report.lepe is not None or "lepe" in report.skipped


def test_evaluate_is_deterministic(toy_corpus, tiny_config, checkpoint, small_extractor):
    config = dataclasses.replace(
        tiny_config,
        eval=EvalConfig(n_triples=8, fid_layer=0, patch_size=16),
    )
    first, second = (
        evaluate(config, toy_corpus, checkpoint, labeler=ToyLabeler(), extractor=small_extractor)
        for _ in range(2)
    )
    assert first.fid is not None
    assert "fid" not in first.skipped
    assert first.to_dict() == second.to_dict()


def test_evaluate_without_relabeling(toy_corpus, tiny_config, checkpoint, small_extractor):
    report = evaluate(
        tiny_config,
        toy_corpus,
        checkpoint,
        labeler=PrecomputedLabeler(LabelKind.TOY_MASK, 1),
        extractor=small_extractor,
    )
    assert report.lepe is None
    assert report.seg is None
    assert report.skipped["seg"] == "labeler cannot label synthesized images"
    assert report.style_win_rate is not None


def test_evaluate_checks_config_hash(toy_corpus, tiny_config, checkpoint, small_extractor):
    config = dataclasses.replace(tiny_config, seed=5)
    with pytest.raises(ConfigHashMismatchError):
        evaluate(config, toy_corpus, checkpoint, labeler=ToyLabeler(), extractor=small_extractor)


def test_evaluate_checks_image_size(toy_corpus, tiny_config, tmp_path, small_extractor):
    config = dataclasses.replace(tiny_config, image_size=(64, 64))
    checkpoint = save_checkpoint(build_state(config), tmp_path / "large.ckpt")
    with pytest.raises(ConfigurationError, match="config.image_size is 64×64"):
        evaluate(config, toy_corpus, checkpoint, labeler=ToyLabeler(), extractor=small_extractor)
