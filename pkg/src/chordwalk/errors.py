"""Exception types shared across the package."""

from __future__ import annotations


class ChordwalkError(Exception):
    """Base class for all package-specific errors."""


class GraphFormatError(ChordwalkError):
    """Malformed graph input (bad edge list, self-loop, invalid ids)."""


class PreconditionError(ChordwalkError):
    """An operation was called on input violating its stated preconditions."""


class ExtractionError(ChordwalkError):
    """A cleanup stage failed; carries the stage name and, when available,
    the partial report accumulated so far."""

    def __init__(self, stage: str, message: str, report=None):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.report = report


class BudgetExhausted(ChordwalkError):
    """A bounded search ran out of its step or attempt budget."""


class StarForestError(ChordwalkError):
    """A star-forest round fell short of its target."""

    def __init__(self, round_index: int, achieved: int, needed: int):
        super().__init__(
            f"round {round_index}: extracted {achieved} of {needed} stars")
        self.round_index = round_index
        self.achieved = achieved
        self.needed = needed
