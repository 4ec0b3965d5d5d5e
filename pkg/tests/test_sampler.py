from collections import Counter

import pytest
from scipy import stats

from exemplar_synth.config import SamplerConfig
from exemplar_synth.corpus import PairingMode
from exemplar_synth.exceptions import CorpusError, EmptyDomainError
from exemplar_synth.sampler import (
    PairRecord,
    Provenance,
    apply_human_labels,
    build_training_samples,
    make_training_sample,
    pair_violation,
    read_pairs,
    sample_consistent_pairs,
    sample_guidance_pairs,
    sample_inconsistent_pairs,
    style_codes,
    write_pairs,
)
from exemplar_synth.types import ImageRef
from tests.factories import ImageRefFactory, PairRecordFactory, video_corpus


@pytest.fixture()
def videos():
    return video_corpus(20, 50)


def test_consistent_pairs_respect_window(videos):
    config = SamplerConfig(T=10)
    pairs = sample_consistent_pairs(videos, config, 10_000)
    assert len(pairs) == 10_000
    assert all(pair_violation(p, config.T) is None for p in pairs)
    assert {p.provenance for p in pairs} == {Provenance.SAME_VIDEO_WINDOW}
    assert max(abs(p.ref_a.frame_index - p.ref_b.frame_index) for p in pairs) == 10


def test_consistent_pairs_are_uniform():
    # frames 0..4 with T=2 have 7 window pairs
    corpus = video_corpus(1, 5)
    pairs = sample_consistent_pairs(corpus, SamplerConfig(T=2), 7_000)
    counts = Counter((p.ref_a.frame_index, p.ref_b.frame_index) for p in pairs)
    assert set(counts) == {(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)}
    assert all(850 < c < 1150 for c in counts.values())


def test_window_uses_frame_indices():
    # frames 0, 5, 10, ... : only neighbours fit into T=5
    corpus = video_corpus(2, 10, frame_step=5)
    pairs = sample_consistent_pairs(corpus, SamplerConfig(T=5), 500)
    assert {abs(p.ref_a.frame_index - p.ref_b.frame_index) for p in pairs} == {5}

    with pytest.raises(EmptyDomainError, match="T=4"):
        sample_consistent_pairs(corpus, SamplerConfig(T=4), 1)


def test_group_consistent_pairs():
    corpus = video_corpus(4, 5, pairing=PairingMode.GROUP)
    pairs = sample_consistent_pairs(corpus, SamplerConfig(), 1_000)
    assert {p.provenance for p in pairs} == {Provenance.SAME_GROUP}
    assert all(pair_violation(p, 10) is None for p in pairs)
    assert all(p.ref_a < p.ref_b for p in pairs)

    with pytest.raises(EmptyDomainError):
        sample_consistent_pairs(video_corpus(3, 1, pairing=PairingMode.GROUP), SamplerConfig(), 1)


def test_inconsistent_pairs(videos):
    pairs = sample_inconsistent_pairs(videos, SamplerConfig(), 10_000)
    assert len(pairs) == 10_000
    assert all(p.ref_a.video_id != p.ref_b.video_id for p in pairs)
    assert all(p.ref_a.group_id != p.ref_b.group_id for p in pairs)
    assert all(pair_violation(p, 10) is None for p in pairs)

    with pytest.raises(EmptyDomainError, match="at least 2 videos"):
        sample_inconsistent_pairs(video_corpus(1, 50), SamplerConfig(), 1)


def test_inconsistent_pairs_cover_video_pairings_uniformly():
    pairs = sample_inconsistent_pairs(video_corpus(3, 40), SamplerConfig(seed=3), 6_000)
    counts = Counter(tuple(sorted((p.ref_a.video_id, p.ref_b.video_id))) for p in pairs)
    assert set(counts) == {
        ("video-000", "video-001"),
        ("video-000", "video-002"),
        ("video-001", "video-002"),
    }
    assert stats.chisquare(list(counts.values())).pvalue > 1e-3


def test_sampling_is_deterministic(videos, tmp_path):
    config = SamplerConfig(seed=7)
    for name in ("first.tsv", "second.tsv"):
        pairs = sample_consistent_pairs(videos, config, 500) + sample_inconsistent_pairs(
            videos,
            config,
            500,
        )
        write_pairs(pairs, tmp_path / name)

    assert (tmp_path / "first.tsv").read_bytes() == (tmp_path / "second.tsv").read_bytes()
    assert read_pairs(tmp_path / "first.tsv") == pairs

    other = sample_inconsistent_pairs(videos, SamplerConfig(seed=8), 500)
    assert other != pairs[500:]


def test_guidance_pairs():
    corpus = video_corpus(3, 4)
    pairs = sample_guidance_pairs(corpus, SamplerConfig(guidance_per_label=5))
    per_label = Counter(p.ref_a for p in pairs)
    assert set(per_label) == {e.ref for e in corpus}
    assert set(per_label.values()) == {5}
    assert all(p.ref_a.video_id != p.ref_b.video_id for p in pairs)

    # only 8 frames of other videos exist
    pairs = sample_guidance_pairs(corpus, SamplerConfig(guidance_per_label=30))
    assert set(Counter(p.ref_a for p in pairs).values()) == {8}


def test_style_codes():
    corpus = video_corpus(3, 2)
    assert style_codes(corpus).tolist() == [0, 0, 1, 1, 2, 2]


def test_pair_record_needs_two_images():
    ref = ImageRefFactory.build()
    with pytest.raises(ValueError, match="two distinct images"):
        PairRecord(ref, ref, True, Provenance.SAME_GROUP)


@pytest.mark.parametrize(
    ("record", "violation"),
    [
        (
            PairRecord(ImageRef(0, "v", 0), ImageRef(0, "v", 12), True, Provenance.SAME_VIDEO_WINDOW),
            "frame gap 12 outside [1, 10]",
        ),
        (
            PairRecord(ImageRef(0, "v", 0), ImageRef(0, "w", 1), True, Provenance.SAME_VIDEO_WINDOW),
            "videos differ (v vs w)",
        ),
        (
            PairRecord(ImageRef(0, "v", 0), ImageRef(1, "w", 0), True, Provenance.SAME_GROUP),
            "groups differ (0 vs 1)",
        ),
        (
            PairRecord(ImageRef(2, "v", 0), ImageRef(2, "w", 0), False, Provenance.CROSS_GROUP),
            "groups are equal (2)",
        ),
        (
            PairRecord(ImageRef(0, "v", 0), ImageRef(1, "w", 0), True, Provenance.HUMAN_LABELED),
            None,
        ),
    ],
)
def test_pair_violation(record, violation):
    assert pair_violation(record, 10) == violation


def test_human_labels(tmp_path):
    cross = PairRecordFactory.build()
    window = PairRecord(ImageRef(0, "v", 0), ImageRef(0, "v", 1), True, Provenance.SAME_VIDEO_WINDOW)
    untouched = PairRecordFactory.build()
    path = tmp_path / "human.tsv"
    path.write_text(
        "ref_a\tref_b\tverdict\n"
        f"{cross.ref_b}\t{cross.ref_a}\tconsistent\n"
        f"{window.ref_a}\t{window.ref_b}\tinconsistent\n"
        f"{untouched.ref_a}\t{untouched.ref_b}\tmaybe\n"
        "0/v/0\t9/nowhere/3\tno\n"
        "not-a-ref\t0/v/0\tyes\n"
        "too\tfew\n",
        encoding="utf-8",
    )

    relabeled, rejects = apply_human_labels([cross, window, untouched], path)
    assert relabeled[0].consistent
    assert relabeled[0].provenance is Provenance.HUMAN_LABELED
    assert relabeled[0].ref_a == cross.ref_a
    assert relabeled[1:] == [window, untouched]
    assert [r.reason for r in rejects] == [
        "only cross-group pairs take human labels",
        "unknown verdict 'maybe'",
        "label for a pair that was never sampled",
        "malformed image reference",
        "expected ref_a, ref_b and verdict",
    ]
    assert rejects[0].subject == "human.tsv:3"


def test_read_pairs_errors(tmp_path):
    with pytest.raises(CorpusError, match="does not exist"):
        read_pairs(tmp_path / "pairs.tsv")

    (tmp_path / "pairs.tsv").write_text("0/v/0\t0/v/1\ttrue\tsomewhere\t0\n", encoding="utf-8")
    with pytest.raises(CorpusError, match="pairs.tsv:1: malformed pair record"):
        read_pairs(tmp_path / "pairs.tsv")


def test_training_samples(toy_corpus):
    config = SamplerConfig(guidance_per_label=2)
    pairs = sample_guidance_pairs(toy_corpus, SamplerConfig(guidance_per_label=3))
    samples, rejects = build_training_samples(toy_corpus, pairs, config)
    assert rejects == []
    assert len(samples) == 2 * len(toy_corpus)
    assert all(not s.style_consistent for s in samples)

    sample = samples[0]
    assert sample.ref_a == pairs[0].ref_a
    assert sample.z.size == sample.x.size == (32, 32)

    swapped = make_training_sample(toy_corpus, pairs[0], swap=True)
    assert swapped.ref_a == pairs[0].ref_b
    assert swapped.ref_b == pairs[0].ref_a

    with pytest.raises(EmptyDomainError):
        build_training_samples(toy_corpus, [], config)
