"""Attribute style groups for street-view style data.

Images are bucketed by their (weather, time of day) attributes into 13 groups.
Night images form a single group whatever the weather.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

from exemplar_synth.exceptions import CorpusError

from .base import RejectRecord

if TYPE_CHECKING:
    from exemplar_synth.utils.typing import PathLike

logger = logging.getLogger(__name__)

NIGHT_GROUP = 1

STYLE_GROUPS: Dict[Tuple[str, str], int] = {
    ("foggy", "dawn or dusk"): 2,
    ("overcast", "daytime"): 3,
    ("rainy", "dawn or dusk"): 4,
    ("snowy", "dawn or dusk"): 5,
    ("clear", "dawn or dusk"): 6,
    ("foggy", "daytime"): 7,
    ("partly cloudy", "dawn or dusk"): 8,
    ("rainy", "daytime"): 9,
    ("snowy", "daytime"): 10,
    ("clear", "daytime"): 11,
    ("overcast", "dawn or dusk"): 12,
    ("partly cloudy", "daytime"): 13,
}

#: Key of a group table row: a whole video, or one frame of it.
GroupKey = Tuple[str, Optional[int]]


def _normalize(value: str) -> str:
    value = " ".join(value.strip().lower().replace("_", " ").split())
    return "dawn or dusk" if value == "dawn/dusk" else value


def style_group(weather: str, timeofday: str) -> Optional[int]:
    """Group id in [1, 13] for an attribute pair, or `None` when it has none.

    >>> style_group("Clear", "Daytime")
    11
    >>> style_group("rainy", "night")
    1
    """
    timeofday = _normalize(timeofday)
    if timeofday == "night":
        return NIGHT_GROUP
    return STYLE_GROUPS.get((_normalize(weather), timeofday))


def read_group_table(
    path: PathLike,
) -> Tuple[Dict[GroupKey, int], List[RejectRecord]]:
    """Read a CSV mapping videos (or single frames) to style groups.

    The table has a `video` column, an optional `frame` column and either a
    `group` column or `weather` and `timeofday` columns. Rows with attributes
    outside the group table are returned as rejects.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        columns = set(reader.fieldnames or ())
        if "video" not in columns:
            raise CorpusError(f"{path}: group table needs a `video` column")
        if "group" not in columns and not {"weather", "timeofday"} <= columns:
            raise CorpusError(
                f"{path}: group table needs a `group` column or "
                "`weather` and `timeofday` columns",
            )

        table: Dict[GroupKey, int] = {}
        rejects: List[RejectRecord] = []
        for lineno, row in enumerate(reader, start=2):
            frame_raw = (row.get("frame") or "").strip()
            key = (row["video"].strip(), int(frame_raw) if frame_raw else None)
            subject = f"{path.name}:{lineno}"

            if "group" in columns and (row.get("group") or "").strip():
                try:
                    group: Optional[int] = int(row["group"])
                except ValueError:
                    rejects.append(RejectRecord(subject, f"invalid group {row['group']!r}"))
                    continue
            else:
                group = style_group(row.get("weather") or "", row.get("timeofday") or "")
                if group is None:
                    rejects.append(
                        RejectRecord(
                            subject,
                            f"no style group for weather={row.get('weather')!r}, "
                            f"timeofday={row.get('timeofday')!r}",
                        ),
                    )
                    continue

            table[key] = group

    logger.info("Read %d group assignments from %s (%d rejected)", len(table), path, len(rejects))
    return table, rejects
