from __future__ import annotations

import dataclasses
import enum
import functools
import logging
import shutil
from collections import defaultdict
from pathlib import Path
from typing import TYPE_CHECKING, Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
import torch

from exemplar_synth.exceptions import ConfigurationError, CorpusError, ShapeError
from exemplar_synth.types import Image, ImageRef, LabelKind, LabelMap
from exemplar_synth.utils.imageio import read_gray_png, read_rgb_png, write_png

if TYPE_CHECKING:
    from exemplar_synth.config import TrainConfig
    from exemplar_synth.utils.typing import PathLike, Size2D

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.tsv"
_MANIFEST_COLUMNS = ("image_path", "video_id", "frame_index", "group_id", "label_path", "split")


class PairingMode(str, enum.Enum):
    #: Consistent pairs come from one video within the temporal window.
    VIDEO = "video"
    #: Consistent pairs come from one style group.
    GROUP = "group"


class Split(str, enum.Enum):
    TRAIN = "train"
    TEST = "test"


@dataclasses.dataclass(frozen=True)
class CorpusEntry:
    """One image of a corpus and where to find it and its labels.

    Paths are relative to the corpus root, or absolute for ingested corpora that
    still point at their source folders.
    """

    video_id: str
    frame_index: int
    group_id: int
    image_path: str
    label_path: str
    split: Split = Split.TRAIN

    @property
    def ref(self) -> ImageRef:
        return ImageRef(self.group_id, self.video_id, self.frame_index)


@dataclasses.dataclass(frozen=True)
class RejectRecord:
    subject: str
    reason: str


def labels_from_array(
    array: np.ndarray,
    kind: LabelKind,
    n_channels: int,
    *,
    name: str = "label map",
) -> LabelMap:
    """Turn a raw label array (H×W or H×W×C) into a `LabelMap` of `kind`."""
    if kind is LabelKind.PARSING and array.ndim == 2:
        classes = torch.from_numpy(array.astype(np.int64))
        if classes.min() < 0 or classes.max() >= n_channels:
            raise ShapeError(name, f"class indices in [0, {n_channels})", "out of range values")
        channels = torch.nn.functional.one_hot(classes, n_channels).permute(2, 0, 1)
        return LabelMap(channels.to(torch.float32), kind)

    values = array.astype(np.float32)
    if array.dtype == np.uint8:
        values /= 255.0
    if values.ndim == 2:
        values = values[:, :, None]

    channels = torch.from_numpy(np.ascontiguousarray(values)).permute(2, 0, 1)
    if kind is LabelKind.TOY_MASK:
        channels = (channels >= 0.5).to(torch.float32)
    if channels.shape[0] != n_channels:
        raise ShapeError(name, f"{n_channels} channel(s)", channels.shape[0])

    return LabelMap(channels, kind)


def read_label_array(path: Path, kind: LabelKind, n_channels: int) -> np.ndarray:
    if path.suffix == ".npy":
        return np.load(path)
    if kind in {LabelKind.SKETCH, LabelKind.POSE} and n_channels == 3:
        return read_rgb_png(path)
    return read_gray_png(path)


class Corpus:
    """An immutable, ordered collection of images with labels and style groups.

    Images and labels are read lazily, from in-memory arrays for a freshly
    generated corpus or from files below `root` otherwise.
    """

    def __init__(
        self,
        entries: Iterable[CorpusEntry],
        *,
        label_kind: LabelKind,
        label_channels: int,
        pairing: PairingMode,
        root: Optional[PathLike] = None,
        arrays: Optional[Mapping[str, np.ndarray]] = None,
        rejects: Sequence[RejectRecord] = (),
    ):
        self.entries: List[CorpusEntry] = list(entries)
        self.label_kind = LabelKind(label_kind)
        self.label_channels = label_channels
        self.pairing = PairingMode(pairing)
        self.root = Path(root) if root is not None else None
        self.rejects: List[RejectRecord] = list(rejects)
        self._arrays: Dict[str, np.ndarray] = dict(arrays or {})
        self._by_ref = {e.ref: e for e in self.entries}
        if len(self._by_ref) != len(self.entries):
            raise CorpusError("Corpus entries must have unique (group, video, frame) refs")

        self._image = functools.lru_cache(maxsize=512)(self._read_image)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self) -> str:
        return (
            f"<Corpus {len(self.entries)} images, {len(self.videos())} videos, "
            f"{len(self.groups())} groups, pairing={self.pairing.value}>"
        )

    def entry(self, ref: ImageRef) -> CorpusEntry:
        try:
            return self._by_ref[ref]
        except KeyError:
            raise CorpusError(f"Unknown image reference {ref}") from None

    def _resolve(self, relpath: str) -> Path:
        return (self.root or Path()) / relpath

    def _read_image(self, relpath: str) -> Image:
        array = self._arrays.get(relpath)
        if array is None:
            array = read_rgb_png(self._resolve(relpath))
        return Image.from_uint8(array)

    def image(self, item: Union[ImageRef, CorpusEntry]) -> Image:
        entry = item if isinstance(item, CorpusEntry) else self.entry(item)
        return self._image(entry.image_path)

    def has_labels(self, item: Union[ImageRef, CorpusEntry]) -> bool:
        entry = item if isinstance(item, CorpusEntry) else self.entry(item)
        return entry.label_path in self._arrays or self._resolve(entry.label_path).is_file()

    def labels(self, item: Union[ImageRef, CorpusEntry]) -> LabelMap:
        entry = item if isinstance(item, CorpusEntry) else self.entry(item)
        array = self._arrays.get(entry.label_path)
        if array is None:
            path = self._resolve(entry.label_path)
            if not path.is_file():
                raise CorpusError(f"Missing label file for {entry.ref}: {path}")
            array = read_label_array(path, self.label_kind, self.label_channels)

        return labels_from_array(
            array,
            self.label_kind,
            self.label_channels,
            name=f"labels of {entry.ref}",
        )

    @property
    def image_size(self) -> Size2D:
        if not self.entries:
            raise CorpusError("Empty corpus has no image size")
        return self.image(self.entries[0]).size

    def ensure_fits(self, config: TrainConfig):
        """Raise `ConfigurationError` unless the corpus matches the config's data shape."""
        if self.label_channels != config.label_channels:
            raise ConfigurationError(
                f"Corpus has {self.label_channels} label channel(s), "
                f"config.label_channels is {config.label_channels}",
                suggestion=f"Set label_channels={self.label_channels}",
            )
        if self.entries and tuple(self.image_size) != tuple(config.image_size):
            h, w = self.image_size
            raise ConfigurationError(
                f"Corpus images are {h}×{w}, config.image_size is "
                f"{config.image_size[0]}×{config.image_size[1]}",
                suggestion=(
                    f"Set image_size={h},{w}, or pass the resolved-config.txt "
                    "written when the corpus was generated"
                ),
            )

    def subset(self, split: Split) -> Corpus:
        return Corpus(
            (e for e in self.entries if e.split is split),
            label_kind=self.label_kind,
            label_channels=self.label_channels,
            pairing=self.pairing,
            root=self.root,
            arrays=self._arrays,
        )

    def videos(self) -> Dict[str, List[CorpusEntry]]:
        videos: Dict[str, List[CorpusEntry]] = defaultdict(list)
        for e in self.entries:
            videos[e.video_id].append(e)
        return {k: sorted(v, key=lambda e: e.frame_index) for k, v in sorted(videos.items())}

    def groups(self) -> Dict[int, List[CorpusEntry]]:
        groups: Dict[int, List[CorpusEntry]] = defaultdict(list)
        for e in self.entries:
            groups[e.group_id].append(e)
        return dict(sorted(groups.items()))

    def write(self, root: PathLike) -> Path:
        """Persist images, labels and `manifest.tsv` in the canonical layout.

        Images go to `images/<group>/<video>/<frame>.png` and labels to the
        mirrored `labels/...` path, keeping the label file suffix.
        """
        root = Path(root)
        written = []
        for e in self.entries:
            stem = f"{e.group_id}/{e.video_id}/{e.frame_index:06d}"
            image_path = f"images/{stem}.png"
            label_path = f"labels/{stem}{Path(e.label_path).suffix or '.png'}"

            for src, dst in ((e.image_path, image_path), (e.label_path, label_path)):
                target = root / dst
                target.parent.mkdir(parents=True, exist_ok=True)
                if src in self._arrays:
                    write_png(target, self._arrays[src])
                else:
                    shutil.copyfile(self._resolve(src), target)

            written.append(
                dataclasses.replace(e, image_path=image_path, label_path=label_path),
            )

        lines = [
            f"# label_kind = {self.label_kind.value}\n",
            f"# label_channels = {self.label_channels}\n",
            f"# pairing = {self.pairing.value}\n",
            "\t".join(_MANIFEST_COLUMNS) + "\n",
        ]
        lines.extend(
            f"{e.image_path}\t{e.video_id}\t{e.frame_index}\t{e.group_id}\t"
            f"{e.label_path}\t{e.split.value}\n"
            for e in written
        )
        manifest = root / MANIFEST_NAME
        manifest.write_text("".join(lines), encoding="utf-8")
        logger.info("Wrote %d images to %s", len(written), root)
        return manifest

    @classmethod
    def load(cls, root: PathLike) -> Corpus:
        root = Path(root)
        manifest = root / MANIFEST_NAME
        if not manifest.is_file():
            raise CorpusError(f"No {MANIFEST_NAME} in {root}")

        meta: Dict[str, str] = {}
        entries = []
        for lineno, line in enumerate(manifest.read_text(encoding="utf-8").splitlines(), 1):
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
                continue
            if not line.strip() or line.startswith(_MANIFEST_COLUMNS[0]):
                continue

            fields = line.split("\t")
            if len(fields) != len(_MANIFEST_COLUMNS):
                raise CorpusError(f"{manifest}:{lineno}: expected {len(_MANIFEST_COLUMNS)} fields")
            image_path, video_id, frame, group, label_path, split = fields
            entries.append(
                CorpusEntry(
                    video_id=video_id,
                    frame_index=int(frame),
                    group_id=int(group),
                    image_path=image_path,
                    label_path=label_path,
                    split=Split(split),
                ),
            )

        try:
            return cls(
                entries,
                label_kind=LabelKind(meta["label_kind"]),
                label_channels=int(meta["label_channels"]),
                pairing=PairingMode(meta["pairing"]),
                root=root,
            )
        except KeyError as e:
            raise CorpusError(f"{manifest}: missing header `# {e.args[0]} = ...`") from e


def write_rejects(rejects: Sequence[RejectRecord], path: PathLike):
    Path(path).write_text(
        "".join(f"{r.subject}\t{r.reason}\n" for r in rejects),
        encoding="utf-8",
    )
