from __future__ import annotations

from pathlib import Path
from typing import Tuple, TypeVar, Union

from typing_extensions import TypeAlias

_T = TypeVar("_T")

Size2D: TypeAlias = Tuple[int, int]
PairOf: TypeAlias = Tuple[_T, _T]
PathLike: TypeAlias = Union[str, Path]
RGB: TypeAlias = Tuple[float, float, float]
