from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING, List, Optional, Tuple

import numpy as np
from PIL import Image as PILImage

from exemplar_synth.exceptions import CorpusError
from exemplar_synth.types import SPATIAL_MULTIPLE, LabelKind

from .base import Corpus, CorpusEntry, PairingMode, RejectRecord
from .groups import read_group_table

if TYPE_CHECKING:
    from exemplar_synth.utils.typing import PathLike, Size2D

logger = logging.getLogger(__name__)

LABEL_SUFFIXES = (".png", ".npy")


def _frame_files(video_dir: Path) -> List[Tuple[int, Path]]:
    files = sorted(p for p in video_dir.iterdir() if p.suffix.lower() == ".png")
    if all(p.stem.isdigit() for p in files):
        return sorted((int(p.stem), p) for p in files)
    return list(enumerate(files))


def _find_label(labels_dir: Path, video_id: str, stem: str) -> Optional[Path]:
    for suffix in LABEL_SUFFIXES:
        candidate = labels_dir / video_id / f"{stem}{suffix}"
        if candidate.is_file():
            return candidate
    return None


def _image_size(path: Path) -> Size2D:
    with PILImage.open(path) as img:
        width, height = img.size
    return (height, width)


def _label_size(path: Path) -> Size2D:
    if path.suffix == ".npy":
        shape = np.load(path, mmap_mode="r").shape
        return (shape[0], shape[1])
    return _image_size(path)


def ingest_frames(
    frames_dir: PathLike,
    labels_dir: PathLike,
    *,
    label_kind: LabelKind,
    label_channels: int,
    group_table: Optional[PathLike] = None,
) -> Corpus:
    """Build a corpus from pre-extracted frame folders.

    Frames are read from `frames_dir/<video>/<frame>.png` and their labels from
    `labels_dir/<video>/<frame>.png` (or `.npy`). Without a group table every
    video is its own group and consistent pairs come from the temporal window.
    With one, groups come from the table and consistent pairs from within groups.

    Frames that cannot be used (no label, no group, bad size) are kept in
    `Corpus.rejects` instead of being dropped silently.
    """
    frames_dir = Path(frames_dir)
    labels_dir = Path(labels_dir)
    if not frames_dir.is_dir():
        raise CorpusError(f"Frames directory {frames_dir} does not exist")

    table = None
    rejects: List[RejectRecord] = []
    if group_table is not None:
        table, table_rejects = read_group_table(group_table)
        rejects.extend(table_rejects)

    entries = []
    videos = sorted(p for p in frames_dir.iterdir() if p.is_dir())
    for ordinal, video_dir in enumerate(videos):
        video_id = video_dir.name
        for frame_index, frame_path in _frame_files(video_dir):
            subject = f"{video_id}/{frame_path.name}"

            label_path = _find_label(labels_dir, video_id, frame_path.stem)
            if label_path is None:
                rejects.append(RejectRecord(subject, "missing label file"))
                continue

            size = _image_size(frame_path)
            if size[0] % SPATIAL_MULTIPLE or size[1] % SPATIAL_MULTIPLE:
                rejects.append(
                    RejectRecord(subject, f"size {size} not divisible by {SPATIAL_MULTIPLE}"),
                )
                continue
            if _label_size(label_path) != size:
                rejects.append(RejectRecord(subject, "label size differs from image size"))
                continue

            if table is None:
                group_id: Optional[int] = ordinal
            else:
                group_id = table.get((video_id, frame_index), table.get((video_id, None)))
                if group_id is None:
                    rejects.append(RejectRecord(subject, "no row in the group table"))
                    continue

            entries.append(
                CorpusEntry(
                    video_id=video_id,
                    frame_index=frame_index,
                    group_id=group_id,
                    image_path=str(frame_path.resolve()),
                    label_path=str(label_path.resolve()),
                ),
            )

    logger.info(
        "Ingested %d frames from %d videos in %s (%d rejected)",
        len(entries),
        len(videos),
        frames_dir,
        len(rejects),
    )
    return Corpus(
        entries,
        label_kind=label_kind,
        label_channels=label_channels,
        pairing=PairingMode.VIDEO if table is None else PairingMode.GROUP,
        rejects=rejects,
    )
