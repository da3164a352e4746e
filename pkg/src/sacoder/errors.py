"""Custom exceptions for sacoder."""

from __future__ import annotations

from collections.abc import Sequence
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from sacoder.validator import Issue


class SacError(Exception):
    """
    Base exception for sacoder errors.

    Raised from library code instead of calling sys.exit(1) directly.
    Caught at the CLI layer to print the message and exit cleanly.
    """


# ========== Model errors ==========


class AllZeroError(SacError):
    """Every frequency is zero; no model can be built."""


class BadDistributionError(SacError):
    """Probabilities do not form a distribution."""


class TotalTooSmallError(SacError):
    """The requested total cannot give every positive symbol a count."""


class ModelSyntaxError(SacError):
    """A model sidecar line could not be parsed."""

    def __init__(self, line: int, text: str):
        self.line = line
        super().__init__(f"Model file syntax error on line {line}: {text!r}")


# ========== Coding errors ==========


class OutOfRangeError(SacError):
    """A symbol (or set index) lies outside the alphabet."""

    def __init__(self, symbol: int, position: int | None = None, limit: int | None = None):
        self.symbol = symbol
        self.position = position
        self.limit = limit
        where = f" at position {position}" if position is not None else ""
        bound = f" (alphabet size {limit})" if limit is not None else ""
        super().__init__(f"Symbol {symbol}{where} is out of range{bound}")


class ZeroProbabilityError(SacError):
    """A symbol or synonymous set with zero probability was coded."""

    def __init__(self, position: int | None = None, symbol: int | None = None):
        self.position = position
        self.symbol = symbol
        what = f"symbol {symbol}" if symbol is not None else "interval update"
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"Zero probability for {what}{where}")


class ZeroMassSetError(SacError):
    """Export policy needs probability mass but the set has none."""


class DesyncError(SacError):
    """Decoder state no longer matches the codeword (corrupted input)."""


# ========== Partition errors ==========


class PartitionSyntaxError(SacError):
    """A partition file line could not be parsed."""

    def __init__(self, line: int, text: str):
        self.line = line
        super().__init__(f"Partition syntax error on line {line}: {text!r}")


class EmptyPartitionError(SacError):
    """A partition file defines no sets."""


class ValidationError(SacError):
    """Structured validation failed; ``issues`` holds every problem found."""

    def __init__(self, what: str, issues: Sequence[Issue]):
        self.issues = list(issues)
        listing = "\n".join(f"  - {issue}" for issue in self.issues)
        super().__init__(f"Invalid {what}:\n{listing}")


# ========== Container errors ==========


class ContainerError(SacError):
    """The bytes are not a usable SAC container."""


class DigestMismatchError(ContainerError):
    """Header digest does not match the header or the supplied model/partition."""


class TruncatedPayloadError(ContainerError):
    """The container ends before the declared header or payload does."""


# ========== Edge map errors ==========


class MalformedPbmError(SacError):
    """The input is not a valid P1/P4 bitmap."""

    def __init__(self, offset: int, reason: str):
        self.offset = offset
        super().__init__(f"Malformed PBM at byte {offset}: {reason}")


class OddDimensionsError(SacError):
    """Edge maps must have even width and height for 2x2 tiling."""

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        super().__init__(f"Edge map is {width}x{height}; width and height must both be even")


class LengthMismatchError(SacError):
    """A block sequence does not fit the stated grid."""
