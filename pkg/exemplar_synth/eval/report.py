from __future__ import annotations

import dataclasses
import json
import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, Optional, Tuple

if TYPE_CHECKING:
    from exemplar_synth.utils.typing import PathLike

logger = logging.getLogger(__name__)

REPORT_NAME = "report.txt"


@dataclasses.dataclass(frozen=True)
class MetricReport:
    """Metrics of one evaluation run.

    Fields that could not be computed for the corpus at hand are `None` and
    named in `skipped`, together with the reason.

    Attributes
    ----------
        fid:
            FID between extractor features of real and synthesized images
        lepe:
            Normalized label endpoint error of the relabeled outputs
        seg:
            (per_pixel_acc, per_class_acc, class_iou) of the relabeled outputs
        patch_dist:
            Mean patch feature distance between outputs and their exemplars
        style_win_rate:
            Share of toy triples where the output is closer in style to its own
            exemplar than to a different-style one
        mask_iou:
            Mean IoU between the toy label of each output and its input mask
        n_samples:
            Number of evaluated triples
        config_hash:
            Hash of the training config that produced the checkpoint
        backbone:
            Feature extractor used by fid and patch_dist

    """

    n_samples: int
    config_hash: str
    backbone: str
    fid: Optional[float] = None
    lepe: Optional[float] = None
    seg: Optional[Tuple[float, float, float]] = None
    patch_dist: Optional[float] = None
    style_win_rate: Optional[float] = None
    mask_iou: Optional[float] = None
    skipped: Dict[str, str] = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        for name in ("fid", "lepe", "patch_dist", "style_win_rate", "mask_iou"):
            value = getattr(self, name)
            if value is not None and (not math.isfinite(value) or value < 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {value}")
        if self.seg is not None and not all(0.0 <= s <= 1.0 for s in self.seg):
            raise ValueError(f"Segmentation scores must lie in [0, 1], got {self.seg}")

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        if self.seg is not None:
            data["seg"] = list(self.seg)
        return data

    def to_text(self) -> str:
        """`key = value` lines, one per field, `None` written as an empty value."""
        lines = []
        for key, value in self.to_dict().items():
            if key == "skipped":
                continue
            if value is None:
                text = ""
            elif isinstance(value, list):
                text = ",".join(repr(v) for v in value)
            else:
                text = repr(value) if isinstance(value, float) else str(value)
            lines.append(f"{key} = {text}\n")

        lines.extend(f"skipped.{key} = {reason}\n" for key, reason in sorted(self.skipped.items()))
        return "".join(lines)

    def write(self, out_dir: PathLike, ledger_name: str) -> Path:
        """Write `report.txt` into `out_dir` and append one JSON line to the ledger."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / REPORT_NAME
        path.write_text(self.to_text(), encoding="utf-8")

        with (out_dir / ledger_name).open("a", encoding="utf-8") as f:
            f.write(json.dumps(self.to_dict(), sort_keys=True) + "\n")

        logger.info("Wrote metric report to %s", path)
        return path
