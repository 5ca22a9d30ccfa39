"""Exception hierarchy shared by the engine, store, service and CLI.

Every error carries a stable machine-readable ``code`` so the HTTP layer and
the CLI can surface it uniformly.
"""

from __future__ import annotations


class HipError(Exception):
    """Base class for all engine errors."""

    code = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details


class InvalidArgument(HipError):
    code = "invalid-argument"


class InsufficientExogenousData(HipError):
    code = "insufficient-exogenous-data"


class DivergentResponse(HipError):
    """Raised when the endogenous cascade diverges (branching factor >= 1)."""

    code = "divergent-response"

    def __init__(self, branching_factor: float):
        super().__init__(
            f"endogenous response diverges: branching factor {branching_factor:.6g} >= 1",
            branching_factor=branching_factor,
        )
        self.branching_factor = branching_factor


class NumericOverflow(HipError):
    code = "numeric-overflow"


class FitFailed(HipError):
    code = "fit-failed"


class InvalidVideoId(HipError):
    code = "invalid-id"


class GappedSeries(HipError):
    code = "gapped-series"

    def __init__(self, day: int):
        super().__init__(f"series has a gap at day {day}", day=day)
        self.day = day


class InvalidValue(HipError):
    code = "invalid-value"

    def __init__(self, row: int, message: str):
        super().__init__(message, row=row)
        self.row = row


class EmptySeries(HipError):
    code = "empty-series"


class TooShort(HipError):
    code = "too-short"

    def __init__(self, actual: int, required: int):
        super().__init__(
            f"series has {actual} days, {required} required for fitting",
            actual=actual, required=required,
        )
        self.actual = actual
        self.required = required


class NotFound(HipError):
    code = "not-found"


class StatsUnavailable(HipError):
    code = "stats-unavailable"


class FetchFailed(HipError):
    code = "fetch-failed"


class MutateDefaultCollection(HipError):
    code = "mutate-default-collection"


class UnknownCollection(HipError):
    code = "unknown-collection"


class UnknownVideo(HipError):
    code = "unknown-video"


class NameConflict(HipError):
    code = "name-conflict"


class NotFitted(HipError):
    code = "not-yet-fitted"


class WindowOutOfRange(HipError):
    code = "window-out-of-range"


class DemotionOverflow(HipError):
    code = "demotion-overflow"
