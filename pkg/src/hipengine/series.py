"""Daily popularity series: dense per-day counts starting at upload day 0."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidArgument


class SeriesKind(str, Enum):
    VIEWS = "views"
    SHARES = "shares"
    PROMOTION = "promotion"


EXOGENOUS_KINDS = (SeriesKind.SHARES, SeriesKind.PROMOTION)


@dataclass(frozen=True)
class DailySeries:
    """Aligned per-day counts. Day 0 is the upload day; no gaps allowed.

    Values must be finite and non-negative; explicit zeros stand in for
    days with no activity. Empty series only occur as empty forecast
    windows; imported data is required to be non-empty at the ingestion
    boundary.
    """

    values: np.ndarray = field(repr=False)
    kind: SeriesKind = SeriesKind.VIEWS

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise InvalidArgument("daily series must be a 1-d array")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgument("daily series values must be finite")
        if np.any(arr < 0):
            raise InvalidArgument("daily series values must be non-negative")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "kind", SeriesKind(self.kind))

    def __len__(self) -> int:
        return int(self.values.size)

    def total(self) -> float:
        return float(self.values.sum())

    def prefix(self, days: int) -> "DailySeries":
        if days < 1 or days > len(self):
            raise InvalidArgument(f"prefix of {days} days out of range for length {len(self)}")
        return DailySeries(self.values[:days], self.kind)

    def padded(self, length: int) -> np.ndarray:
        """Values zero-padded (or truncated) to ``length``."""
        if length <= len(self):
            return np.array(self.values[:length])
        return np.concatenate([self.values, np.zeros(length - len(self))])

    @classmethod
    def zeros(cls, length: int, kind: SeriesKind = SeriesKind.VIEWS) -> "DailySeries":
        return cls(np.zeros(length), kind)
