"""Style-consistent and style-inconsistent pair sampling.

Consistent pairs are two frames of one video at most `T` frames apart, or two
images of one style group. Inconsistent pairs are two images from different
videos (or groups). Every draw is a pure function of the corpus, the sampler
config and its seed.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
from collections import Counter
from pathlib import Path
from typing import TYPE_CHECKING, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import SamplerConfig
from .corpus.base import Corpus, CorpusEntry, PairingMode, RejectRecord
from .exceptions import CorpusError, EmptyDomainError
from .types import ImageRef, TrainingSample

if TYPE_CHECKING:
    from .utils.typing import PathLike

__all__ = [
    "PairRecord",
    "Provenance",
    "SamplerConfig",
    "apply_human_labels",
    "build_training_samples",
    "make_training_sample",
    "pair_violation",
    "read_pairs",
    "sample_consistent_pairs",
    "sample_guidance_pairs",
    "sample_inconsistent_pairs",
    "style_codes",
    "write_pairs",
]

logger = logging.getLogger(__name__)

PAIRS_HEADER = ("ref_a", "ref_b", "consistent", "provenance", "seed")

# Independent streams derived from the sampler seed
_CONSISTENT_STREAM = 0
_INCONSISTENT_STREAM = 1
_GUIDANCE_STREAM = 2
#: Stream of the held-out evaluation triples
EVAL_STREAM = 3

_CONSISTENT_VERDICTS = {"consistent", "true", "1", "yes"}
_INCONSISTENT_VERDICTS = {"inconsistent", "false", "0", "no"}


class Provenance(str, enum.Enum):
    SAME_VIDEO_WINDOW = "same-video-window"
    SAME_GROUP = "same-group"
    CROSS_GROUP = "cross-group"
    HUMAN_LABELED = "human-labeled"


@dataclasses.dataclass(frozen=True)
class PairRecord:
    """A sampled image pair.

    Attributes
    ----------
        ref_a:
            First image; the target z when the pair becomes a training sample
        ref_b:
            Second image; the exemplar I when the pair becomes a training sample
        consistent:
            Whether both images share a style
        provenance:
            How `consistent` was established
        seed:
            Sampler seed the record was drawn with

    """

    ref_a: ImageRef
    ref_b: ImageRef
    consistent: bool
    provenance: Provenance
    seed: int = 0

    def __post_init__(self):
        if self.ref_a == self.ref_b:
            raise ValueError(f"A pair needs two distinct images, got {self.ref_a} twice")

    @property
    def key(self) -> FrozenSet[ImageRef]:
        """Order independent identity of the pair."""
        return frozenset((self.ref_a, self.ref_b))


def pair_violation(record: PairRecord, window: int) -> Optional[str]:
    """Describe how `record` breaks the pair invariants, or `None` if it holds."""
    a, b = record.ref_a, record.ref_b
    if record.provenance is Provenance.SAME_VIDEO_WINDOW:
        if not record.consistent:
            return "same-video-window pairs are consistent"
        if a.video_id != b.video_id:
            return f"videos differ ({a.video_id} vs {b.video_id})"
        gap = abs(a.frame_index - b.frame_index)
        if not 1 <= gap <= window:
            return f"frame gap {gap} outside [1, {window}]"
    elif record.provenance is Provenance.SAME_GROUP:
        if not record.consistent:
            return "same-group pairs are consistent"
        if a.group_id != b.group_id:
            return f"groups differ ({a.group_id} vs {b.group_id})"
    elif record.provenance is Provenance.CROSS_GROUP:
        if record.consistent:
            return "cross-group pairs are inconsistent until a human says otherwise"
        if a.group_id == b.group_id:
            return f"groups are equal ({a.group_id})"
    return None


def _rng(config: SamplerConfig, stream: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, stream])


def _canonical(a: CorpusEntry, b: CorpusEntry) -> Tuple[ImageRef, ImageRef]:
    return (a.ref, b.ref) if a.ref < b.ref else (b.ref, a.ref)


def _style_key(entry: CorpusEntry, pairing: PairingMode) -> Union[str, int]:
    return entry.video_id if pairing is PairingMode.VIDEO else entry.group_id


def style_codes(corpus: Corpus) -> np.ndarray:
    """Integer code per entry; equal codes mean same video (or group)."""
    codes: Dict[Union[str, int], int] = {}
    return np.array(
        [codes.setdefault(_style_key(e, corpus.pairing), len(codes)) for e in corpus.entries],
        dtype=np.int64,
    )


def _sample_window_pairs(
    corpus: Corpus,
    config: SamplerConfig,
    count: int,
    rng: np.random.Generator,
) -> List[PairRecord]:
    # Enumerate anchors (video, i) with n_i later frames inside the window. A
    # uniform draw over all window pairs picks anchor i with weight n_i.
    frames: List[List[CorpusEntry]] = []
    anchors: List[Tuple[int, int]] = []
    counts: List[int] = []
    for entries in corpus.videos().values():
        indices = np.array([e.frame_index for e in entries])
        upper = np.searchsorted(indices, indices + config.T, side="right")
        for i, n in enumerate(upper - np.arange(len(indices)) - 1):
            if n > 0:
                anchors.append((len(frames), i))
                counts.append(int(n))
        frames.append(entries)

    if not counts:
        raise EmptyDomainError(
            f"no video has two distinct frames at most T={config.T} frames apart",
        )

    cumulative = np.cumsum(counts)
    draws = rng.integers(cumulative[-1], size=count)
    slots = np.searchsorted(cumulative, draws, side="right")

    records = []
    for draw, slot in zip(draws, slots):
        video, i = anchors[slot]
        offset = draw - (cumulative[slot - 1] if slot else 0)
        a, b = frames[video][i], frames[video][i + 1 + int(offset)]
        records.append(
            PairRecord(a.ref, b.ref, True, Provenance.SAME_VIDEO_WINDOW, config.seed),
        )

    return records


def _sample_group_pairs(
    corpus: Corpus,
    config: SamplerConfig,
    count: int,
    rng: np.random.Generator,
) -> List[PairRecord]:
    groups = [entries for entries in corpus.groups().values() if len(entries) >= 2]
    if not groups:
        raise EmptyDomainError("no style group has two distinct images")

    sizes = np.array([len(g) for g in groups], dtype=np.float64)
    weights = sizes * (sizes - 1) / 2
    choices = rng.choice(len(groups), size=count, p=weights / weights.sum())

    records = []
    for g in choices:
        i, j = rng.choice(len(groups[g]), size=2, replace=False)
        ref_a, ref_b = _canonical(groups[g][i], groups[g][j])
        records.append(PairRecord(ref_a, ref_b, True, Provenance.SAME_GROUP, config.seed))

    return records


def sample_consistent_pairs(
    corpus: Corpus,
    config: SamplerConfig,
    count: int,
) -> List[PairRecord]:
    """Draw `count` style-consistent pairs uniformly over all valid pairs.

    Video corpora pair two frames of one video at most `config.T` frames apart;
    grouped corpora pair two images of one style group.
    """
    rng = _rng(config, _CONSISTENT_STREAM)
    if corpus.pairing is PairingMode.VIDEO:
        records = _sample_window_pairs(corpus, config, count, rng)
    else:
        records = _sample_group_pairs(corpus, config, count, rng)

    logger.debug("Sampled %d consistent pairs (%s)", len(records), corpus.pairing.value)
    return records


def sample_inconsistent_pairs(
    corpus: Corpus,
    config: SamplerConfig,
    count: int,
) -> List[PairRecord]:
    """Draw `count` pairs from different videos (or groups), uniformly over such pairs.

    Records are marked `cross-group`: they are assumed inconsistent until a
    human label says otherwise.
    """
    entries = corpus.entries
    keys = style_codes(corpus)
    what = "videos" if corpus.pairing is PairingMode.VIDEO else "style groups"
    if len(np.unique(keys)) < 2:
        raise EmptyDomainError(f"inconsistent pairs need at least 2 {what}")

    rng = _rng(config, _INCONSISTENT_STREAM)
    records: List[PairRecord] = []
    while len(records) < count:
        # Rejection sampling over uniform unordered pairs of distinct images
        batch = max(2 * (count - len(records)), 16)
        i = rng.integers(len(entries), size=batch)
        j = rng.integers(len(entries), size=batch)
        accepted = keys[i] != keys[j]
        for a, b in zip(i[accepted], j[accepted]):
            ref_a, ref_b = _canonical(entries[a], entries[b])
            records.append(PairRecord(ref_a, ref_b, False, Provenance.CROSS_GROUP, config.seed))
            if len(records) == count:
                break

    logger.debug("Sampled %d inconsistent pairs across %s", len(records), what)
    return records


def sample_guidance_pairs(corpus: Corpus, config: SamplerConfig) -> List[PairRecord]:
    """Draw `guidance_per_label` exemplars from other videos/groups for every image.

    Records are ordered: `ref_a` is the labeled image, `ref_b` its exemplar.
    Fewer exemplars are drawn when fewer exist.
    """
    entries = corpus.entries
    keys = style_codes(corpus)
    rng = _rng(config, _GUIDANCE_STREAM)

    records = []
    for index, entry in enumerate(entries):
        candidates = np.flatnonzero(keys != keys[index])
        if not len(candidates):
            continue
        size = min(config.guidance_per_label, len(candidates))
        for c in rng.choice(candidates, size=size, replace=False):
            records.append(
                PairRecord(entry.ref, entries[c].ref, False, Provenance.CROSS_GROUP, config.seed),
            )

    logger.debug("Sampled %d guidance pairs for %d images", len(records), len(entries))
    return records


def _parse_verdict(raw: str) -> Optional[bool]:
    verdict = raw.strip().lower()
    if verdict in _CONSISTENT_VERDICTS:
        return True
    if verdict in _INCONSISTENT_VERDICTS:
        return False
    return None


def apply_human_labels(
    pairs: Sequence[PairRecord],
    path: PathLike,
) -> Tuple[List[PairRecord], List[RejectRecord]]:
    """Relabel cross-group pairs from a `ref_a<TAB>ref_b<TAB>verdict` file.

    Pairs are matched regardless of member order. A labeled pair becomes
    `human-labeled` with the given verdict; unlabeled pairs are unchanged.
    """
    path = Path(path)
    by_key = {p.key: p for p in pairs}

    verdicts: Dict[FrozenSet[ImageRef], bool] = {}
    rejects = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#") or line.startswith("ref_a"):
            continue

        subject = f"{path.name}:{lineno}"
        fields = line.split("\t")
        if len(fields) != 3:
            rejects.append(RejectRecord(subject, "expected ref_a, ref_b and verdict"))
            continue
        try:
            key = frozenset((ImageRef.parse(fields[0]), ImageRef.parse(fields[1])))
        except ValueError:
            rejects.append(RejectRecord(subject, "malformed image reference"))
            continue

        verdict = _parse_verdict(fields[2])
        if verdict is None:
            rejects.append(RejectRecord(subject, f"unknown verdict {fields[2].strip()!r}"))
        elif key not in by_key:
            rejects.append(RejectRecord(subject, "label for a pair that was never sampled"))
        elif by_key[key].provenance not in {Provenance.CROSS_GROUP, Provenance.HUMAN_LABELED}:
            rejects.append(RejectRecord(subject, "only cross-group pairs take human labels"))
        else:
            verdicts[key] = verdict

    relabeled = [
        dataclasses.replace(p, consistent=verdicts[p.key], provenance=Provenance.HUMAN_LABELED)
        if p.key in verdicts
        else p
        for p in pairs
    ]
    logger.info("Applied %d human labels from %s (%d rejected)", len(verdicts), path, len(rejects))
    return relabeled, rejects


def make_training_sample(
    corpus: Corpus,
    record: PairRecord,
    *,
    swap: bool = False,
) -> TrainingSample:
    """Load the training tuple of a pair; `swap` exchanges the roles of z and I."""
    z_ref, exemplar_ref = (record.ref_b, record.ref_a) if swap else (record.ref_a, record.ref_b)
    return TrainingSample(
        x=corpus.labels(z_ref),
        z=corpus.image(z_ref),
        exemplar=corpus.image(exemplar_ref),
        exemplar_labels=corpus.labels(exemplar_ref),
        style_consistent=record.consistent,
        ref_a=z_ref,
        ref_b=exemplar_ref,
    )


def build_training_samples(
    corpus: Corpus,
    pairs: Sequence[PairRecord],
    config: SamplerConfig,
) -> Tuple[List[TrainingSample], List[RejectRecord]]:
    """Materialize training tuples, at most `guidance_per_label` per target image.

    Pairs whose images lack a label file become reject records.
    """
    if not pairs:
        raise EmptyDomainError("training samples need at least one pair")

    per_label: Counter = Counter()
    samples = []
    rejects = []
    for record in pairs:
        if per_label[record.ref_a] >= config.guidance_per_label:
            continue

        missing = [ref for ref in (record.ref_a, record.ref_b) if not corpus.has_labels(ref)]
        if missing:
            rejects.append(
                RejectRecord(f"{record.ref_a}\t{record.ref_b}", f"missing label file for {missing[0]}"),
            )
            continue

        samples.append(make_training_sample(corpus, record))
        per_label[record.ref_a] += 1

    return samples, rejects


def write_pairs(pairs: Sequence[PairRecord], path: PathLike):
    lines = ["\t".join(PAIRS_HEADER) + "\n"]
    lines.extend(
        f"{p.ref_a}\t{p.ref_b}\t{'true' if p.consistent else 'false'}\t"
        f"{p.provenance.value}\t{p.seed}\n"
        for p in pairs
    )
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_pairs(path: PathLike) -> List[PairRecord]:
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"Pair manifest {path} does not exist")

    records = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith(PAIRS_HEADER[0]):
            continue
        try:
            ref_a, ref_b, consistent, provenance, seed = line.split("\t")
            records.append(
                PairRecord(
                    ImageRef.parse(ref_a),
                    ImageRef.parse(ref_b),
                    consistent == "true",
                    Provenance(provenance),
                    int(seed),
                ),
            )
        except ValueError as e:
            raise CorpusError(f"{path}:{lineno}: malformed pair record ({e})") from e

    return records
