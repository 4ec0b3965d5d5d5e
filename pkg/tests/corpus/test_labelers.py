import numpy as np
import pytest
import torch

from exemplar_synth.corpus import (
    LabelerKind,
    PrecomputedLabeler,
    ToyLabeler,
    labels_from_array,
    make_labeler,
)
from exemplar_synth.exceptions import LabelerUnavailableError, ShapeError
from exemplar_synth.types import LabelKind


def test_make_labeler():
    assert isinstance(make_labeler(LabelKind.TOY_MASK), ToyLabeler)
    labeler = make_labeler(LabelKind.POSE, 3)
    assert isinstance(labeler, PrecomputedLabeler)
    assert labeler.kind is LabelerKind.EXTERNAL_PRECOMPUTED
    assert labeler.n_channels == 3


def test_toy_labeler_relabels(toy_corpus):
    labeler = ToyLabeler()
    assert labeler.can_relabel
    entry = toy_corpus.entries[0]
    labels = labeler(toy_corpus.image(entry))
    assert labels.kind is LabelKind.TOY_MASK
    assert torch.equal(labels.channels, toy_corpus.labels(entry).channels)


def test_toy_labeler_channels():
    with pytest.raises(ShapeError):
        ToyLabeler(3)


def test_precomputed_labeler(toy_corpus, tmp_path):
    labeler = PrecomputedLabeler(LabelKind.PARSING, 4)
    assert not labeler.can_relabel
    with pytest.raises(LabelerUnavailableError, match="parsing"):
        labeler(toy_corpus.image(toy_corpus.entries[0]))

    classes = np.arange(16 * 16).reshape(16, 16) % 4
    np.save(tmp_path / "labels.npy", classes)
    labels = labeler.label_file(tmp_path / "labels.npy")
    assert labels.n_channels == 4
    assert torch.equal(labels.channels.argmax(dim=0), torch.from_numpy(classes))


def test_labels_from_array():
    sketch = labels_from_array(np.full((16, 16), 255, dtype=np.uint8), LabelKind.SKETCH, 1)
    assert sketch.channels.max() == 1.0

    with pytest.raises(ShapeError, match="3 channel"):
        labels_from_array(np.zeros((16, 16), dtype=np.uint8), LabelKind.POSE, 3)
    with pytest.raises(ShapeError, match="class indices"):
        labels_from_array(np.full((16, 16), 7), LabelKind.PARSING, 4)
