import numpy as np
import pytest

from exemplar_synth.corpus import PairingMode, ingest_frames
from exemplar_synth.exceptions import CorpusError
from exemplar_synth.types import LabelKind
from exemplar_synth.utils.imageio import write_png


def _frame(path, size=(16, 16)):
    path.parent.mkdir(parents=True, exist_ok=True)
    write_png(path, np.full((*size, 3), 100, dtype=np.uint8))


def _label(path, size=(16, 16)):
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".npy":
        np.save(path, np.zeros(size, dtype=np.uint8))
    else:
        write_png(path, np.zeros(size, dtype=np.uint8))


@pytest.fixture()
def frames(tmp_path):
    frames, labels = tmp_path / "frames", tmp_path / "labels"
    for video in ("clip-a", "clip-b"):
        for frame in (0, 1, 2):
            _frame(frames / video / f"{frame:04d}.png")
            _label(labels / video / f"{frame:04d}.png")

    # one frame with an npy label, one without label, one with a bad size
    _frame(frames / "clip-a" / "0003.png")
    _label(labels / "clip-a" / "0003.npy")
    _frame(frames / "clip-a" / "0004.png")
    _frame(frames / "clip-b" / "0003.png", size=(20, 16))
    _label(labels / "clip-b" / "0003.png", size=(20, 16))
    _frame(frames / "clip-b" / "0004.png")
    _label(labels / "clip-b" / "0004.png", size=(32, 32))
    return frames, labels


def test_ingest_without_table(frames):
    corpus = ingest_frames(*frames, label_kind=LabelKind.SKETCH, label_channels=1)
    assert corpus.pairing is PairingMode.VIDEO
    assert [(e.video_id, e.frame_index, e.group_id) for e in corpus] == [
        ("clip-a", 0, 0),
        ("clip-a", 1, 0),
        ("clip-a", 2, 0),
        ("clip-a", 3, 0),
        ("clip-b", 0, 1),
        ("clip-b", 1, 1),
        ("clip-b", 2, 1),
    ]
    assert {r.subject: r.reason for r in corpus.rejects} == {
        "clip-a/0004.png": "missing label file",
        "clip-b/0003.png": "size (20, 16) not divisible by 16",
        "clip-b/0004.png": "label size differs from image size",
    }
    assert corpus.labels(corpus.entries[3]).size == (16, 16)
    assert corpus.image(corpus.entries[0]).size == (16, 16)


def test_ingest_with_table(frames, tmp_path):
    table = tmp_path / "groups.csv"
    table.write_text(
        "video,frame,group\nclip-a,,5\nclip-a,2,7\n",
        encoding="utf-8",
    )
    corpus = ingest_frames(
        *frames,
        label_kind=LabelKind.SKETCH,
        label_channels=1,
        group_table=table,
    )
    assert corpus.pairing is PairingMode.GROUP
    assert [(e.frame_index, e.group_id) for e in corpus] == [(0, 5), (1, 5), (2, 7), (3, 5)]
    assert sum(r.reason == "no row in the group table" for r in corpus.rejects) == 3


def test_ingest_missing_directory(tmp_path):
    with pytest.raises(CorpusError, match="does not exist"):
        ingest_frames(
            tmp_path / "nowhere",
            tmp_path,
            label_kind=LabelKind.SKETCH,
            label_channels=1,
        )
