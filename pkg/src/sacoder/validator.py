"""
Structured validation results for models and partitions.

Validators collect every problem instead of stopping at the first one;
callers that need a hard failure pass the list to ``ensure_valid``.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

from sacoder.errors import ValidationError


class IssueKind(StrEnum):
    """Kinds of validation problems."""

    LENGTH_MISMATCH = "length-mismatch"
    TOTAL_MISMATCH = "total-mismatch"
    TOTAL_TOO_LARGE = "total-too-large"
    NEGATIVE_COUNT = "negative-count"
    ALL_ZERO = "all-zero"
    OVERLAP = "overlap"
    MISSING = "missing"
    EMPTY_SET = "empty-set"
    UNSORTED = "unsorted"
    UNKNOWN_SYMBOL = "unknown-symbol"


@dataclass(frozen=True)
class Issue:
    """One validation problem, optionally pinned to a symbol or set index."""

    kind: IssueKind
    symbol: int | None = None
    set_index: int | None = None
    detail: str | None = None

    def __str__(self) -> str:
        parts = [str(self.kind)]
        if self.symbol is not None:
            parts.append(f"symbol {self.symbol}")
        if self.set_index is not None:
            parts.append(f"set {self.set_index}")
        text = " ".join(parts)
        if self.detail:
            text = f"{text}: {self.detail}"
        return text


def ensure_valid(what: str, issues: Sequence[Issue]) -> None:
    """
    Raise if any issues were found.

    Raises:
        ValidationError: If ``issues`` is non-empty
    """
    if issues:
        raise ValidationError(what, issues)
