import dataclasses

import pytest
from pytest_snapshot.plugin import Snapshot

from exemplar_synth.config import (
    LossWeights,
    PhaseIterations,
    Violation,
    apply_overrides,
    config_from_text,
    config_hash,
    config_to_text,
    default_config,
    ensure_valid,
    load_config,
    save_config,
    toy_config,
    validate_config,
)
from exemplar_synth.exceptions import ConfigurationError, InvalidConfigError
from exemplar_synth.types import LabelKind
from tests.utils import SNAPSHOTS_DIR


def test_default_config_text(snapshot: Snapshot):
    snapshot.snapshot_dir = SNAPSHOTS_DIR
    snapshot.assert_match(config_to_text(default_config()), "default_config.txt")


def test_defaults():
    config = default_config()
    assert config.image_size == (256, 256)
    assert config.phases.total == 1_000_000
    assert config.base_lr == 2e-4
    assert config.betas == (0.5, 0.999)
    assert config.loss_weights == LossWeights(lambda1=10.0, lambda2=10.0, lambda_fm=0.0)
    assert validate_config(config) == []


def test_toy_config_is_valid():
    config = toy_config()
    assert config.image_size == (64, 64)
    assert config.label_kind is LabelKind.TOY_MASK
    assert config.phases == PhaseIterations(2_000, 2_000, 4_000)
    assert validate_config(config) == []


def test_text_roundtrip(tmp_path):
    config = apply_overrides(
        toy_config(),
        ["perceptual.weights_path=/weights/vgg16.ckpt", "loss_weights.scadv_enabled=false"],
    )
    assert config_from_text(config_to_text(config)) == config

    save_config(config, tmp_path / "config.txt")
    assert load_config(tmp_path / "config.txt") == config


def test_text_ignores_comments_and_keeps_defaults():
    config = config_from_text(
        """
        # sweep
        loss_weights.lambda1 = 2.5

        sampler.T = 4
        """,
    )
    assert config.loss_weights.lambda1 == 2.5
    assert config.sampler.T == 4
    assert config.loss_weights.lambda2 == 10.0


def test_overrides():
    config = apply_overrides(
        default_config(),
        ["image_size=128,64", "perceptual.layers=relu1_2,relu3_3", "label_kind=parsing"],
    )
    assert config.image_size == (128, 64)
    assert config.perceptual.layers == ("relu1_2", "relu3_3")
    assert config.label_kind is LabelKind.PARSING


@pytest.mark.parametrize(
    ("override", "match"),
    [
        ("loss_weights.lambda3=1", "Unknown config key"),
        ("sampler=3", "is a section"),
        ("sampler.T.x=3", "is a value"),
        ("sampler.T=ten", "cannot read"),
        ("image_size=1,2,3", "expected 2"),
        ("loss_weights.scadv_enabled=maybe", "cannot read"),
        ("no_equals_sign", "expected `key = value`"),
    ],
)
def test_bad_overrides(override, match):
    with pytest.raises(ConfigurationError, match=match):
        apply_overrides(default_config(), [override])


def test_hash_ignores_eval_section():
    config = default_config()
    assert len(config_hash(config)) == 16
    assert config_hash(apply_overrides(config, ["eval.n_triples=5"])) == config_hash(config)
    assert config_hash(apply_overrides(config, ["sampler.T=5"])) != config_hash(config)
    assert config_hash(toy_config()) != config_hash(config)


def test_adaptive_switch_in_text_and_hash():
    config = apply_overrides(default_config(), ["loss_weights.adaptive=false"])
    assert config.loss_weights.adaptive is False
    assert "loss_weights.adaptive = false" in config_to_text(config)
    assert config_from_text(config_to_text(config)) == config
    assert config_hash(config) != config_hash(default_config())


def test_validation_lists_every_violation():
    config = dataclasses.replace(
        default_config(),
        image_size=(250, 256),
        phases=PhaseIterations(n_warmup=10, n_scadv=10, n_decay=0),
        loss_weights=LossWeights(lambda1=-1.0),
        seed=-3,
    )
    violations = validate_config(config)
    assert Violation("image_size", "height 250 not divisible by 16") in violations
    assert Violation("phases.n_decay", "must be positive") in violations
    assert Violation("loss_weights.lambda1", "must be nonnegative") in violations
    assert Violation("seed", "must be nonnegative") in violations
    assert len(violations) == 4


def test_validation_of_taps_and_toy_labels():
    config = apply_overrides(
        toy_config(),
        ["perceptual.layers=relu1_2,relu9_9", "label_channels=3", "eval.fid_layer=5"],
    )
    rules = {(v.field, v.rule) for v in validate_config(config)}
    assert ("perceptual.layers", "unknown tap 'relu9_9'") in rules
    assert ("label_channels", "toy-mask labels have exactly 1 channel") in rules
    assert ("eval.fid_layer", "must index perceptual.layers") in rules


def test_ensure_valid():
    config = default_config()
    assert ensure_valid(config) is config

    with pytest.raises(InvalidConfigError, match="base_lr") as exc_info:
        ensure_valid(dataclasses.replace(config, base_lr=0.0))
    assert exc_info.value.exit_code == 3
    assert exc_info.value.violations == [Violation("base_lr", "base_lr must be positive")]
