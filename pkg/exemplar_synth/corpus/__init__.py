from .base import (
    MANIFEST_NAME,
    Corpus,
    CorpusEntry,
    PairingMode,
    RejectRecord,
    Split,
    labels_from_array,
    write_rejects,
)
from .groups import STYLE_GROUPS, read_group_table, style_group
from .ingest import ingest_frames
from .labelers import Labeler, LabelerKind, PrecomputedLabeler, ToyLabeler, make_labeler
from .toy import (
    StyleDistance,
    ToyPalette,
    generate_toy_corpus,
    render_shape_mask,
    toy_label,
    toy_palettes,
    toy_style_distance,
)

__all__ = [
    "MANIFEST_NAME",
    "STYLE_GROUPS",
    "Corpus",
    "CorpusEntry",
    "Labeler",
    "LabelerKind",
    "PairingMode",
    "PrecomputedLabeler",
    "RejectRecord",
    "Split",
    "StyleDistance",
    "ToyLabeler",
    "ToyPalette",
    "generate_toy_corpus",
    "ingest_frames",
    "labels_from_array",
    "make_labeler",
    "read_group_table",
    "render_shape_mask",
    "style_group",
    "toy_label",
    "toy_palettes",
    "toy_style_distance",
    "write_rejects",
]
