"""
Static probability models shared by the encoder and the decoder.

Probabilities are integer counts over an explicit total so both ends of a
stream do bit-identical interval arithmetic.
"""

import math
import re
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real

from sacoder.errors import AllZeroError, BadDistributionError, ModelSyntaxError, TotalTooSmallError
from sacoder.validator import Issue, IssueKind

MAX_TOTAL = 1 << 16
DEFAULT_TOTAL = MAX_TOTAL

_TOLERANCE = Fraction(1, 10**9)
# Floats are read back as the nearest fraction with a bounded denominator so
# 0.3 quantizes as 3/10 rather than as its binary expansion.
_FLOAT_DENOMINATOR = 10**12


@dataclass(frozen=True)
class Alphabet:
    """Syntactic symbols 0..size-1."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError(f"Alphabet size must be at least 1, got {self.size}")

    def __contains__(self, symbol: object) -> bool:
        return isinstance(symbol, int) and 0 <= symbol < self.size


@dataclass(frozen=True)
class ProbabilityTable:
    """
    Per-symbol counts over a fixed total.

    Construction does not validate; use ``validate`` for a structured check.
    Tables built through ``build_from_frequencies`` or ``quantize`` are valid.
    """

    counts: tuple[int, ...]
    total: int

    @property
    def size(self) -> int:
        return len(self.counts)

    def probability(self, symbol: int) -> Fraction:
        return Fraction(self.counts[symbol], self.total)

    def reduced(self) -> "ProbabilityTable":
        """Divide counts and total by their gcd; coding with either is bit-identical."""
        g = math.gcd(*self.counts) if any(self.counts) else 1
        return ProbabilityTable(counts=tuple(c // g for c in self.counts), total=self.total // g)


def table_from_counts(counts: Sequence[int]) -> ProbabilityTable:
    """Wrap raw counts as a table whose total is their sum."""
    values = tuple(int(c) for c in counts)
    return ProbabilityTable(counts=values, total=sum(values))


def build_from_frequencies(freqs: Sequence[int]) -> ProbabilityTable:
    """
    Build a table from observed frequencies.

    Frequencies are kept as-is when they already fit in MAX_TOTAL, otherwise
    they are rescaled with ``quantize``.

    Raises:
        AllZeroError: If every frequency is zero
    """
    values = [int(f) for f in freqs]
    if any(f < 0 for f in values):
        raise BadDistributionError("Frequencies must be non-negative")
    mass = sum(values)
    if mass == 0:
        raise AllZeroError("Cannot build a model: every frequency is zero")
    if mass <= MAX_TOTAL:
        return table_from_counts(values)
    return quantize([Fraction(f, mass) for f in values], MAX_TOTAL)


def _as_fraction(p: Real) -> Fraction:
    if isinstance(p, Rational):
        return Fraction(p.numerator, p.denominator)
    return Fraction(float(p)).limit_denominator(_FLOAT_DENOMINATOR)


def quantize(probs: Sequence[Real], total: int) -> ProbabilityTable:
    """
    Quantize a distribution to integer counts summing to ``total``.

    Largest-remainder method: floor every scaled probability, hand the
    leftover units to the largest fractional parts (ties to the lowest
    index), then make sure every positive-probability symbol has a count by
    taking units from the largest counts.

    Args:
        probs: Probabilities summing to 1 within 1e-9 (floats or fractions)
        total: Target total

    Returns:
        ProbabilityTable with ``sum(counts) == total``

    Raises:
        BadDistributionError: If probs are out of [0, 1] or do not sum to 1
        TotalTooSmallError: If some positive symbol cannot receive a count
    """
    exact = [_as_fraction(p) for p in probs]
    if not exact:
        raise BadDistributionError("Empty distribution")
    for n, p in enumerate(exact):
        if p < 0 or p > 1:
            raise BadDistributionError(f"Probability of symbol {n} is {float(p)}, outside [0, 1]")
    mass = sum(exact, Fraction(0))
    if abs(mass - 1) > _TOLERANCE:
        raise BadDistributionError(f"Probabilities sum to {float(mass)}, not 1")

    positive = sum(1 for p in exact if p > 0)
    if total < 1 or positive > total:
        raise TotalTooSmallError(f"Total {total} cannot cover {positive} positive-probability symbols")

    scaled = [p / mass * total for p in exact]
    counts = [math.floor(s) for s in scaled]
    leftover = total - sum(counts)
    by_remainder = sorted(range(len(scaled)), key=lambda n: (-(scaled[n] - counts[n]), n))
    for n in by_remainder[:leftover]:
        counts[n] += 1

    for n, p in enumerate(exact):
        if p > 0 and counts[n] == 0:
            donor = max(range(len(counts)), key=lambda j: (counts[j], -j))
            if counts[donor] <= 1:
                raise TotalTooSmallError(f"Total {total} too small to give symbol {n} a count")
            counts[donor] -= 1
            counts[n] = 1

    return ProbabilityTable(counts=tuple(counts), total=total)


def validate(table: ProbabilityTable, alphabet: Alphabet) -> list[Issue]:
    """
    Check a table against its invariants and an alphabet.

    Returns:
        List of issues; empty when the table is valid
    """
    issues: list[Issue] = []
    if len(table.counts) != alphabet.size:
        issues.append(
            Issue(
                IssueKind.LENGTH_MISMATCH,
                detail=f"{len(table.counts)} counts for an alphabet of {alphabet.size} symbols",
            )
        )
    for n, c in enumerate(table.counts):
        if c < 0:
            issues.append(Issue(IssueKind.NEGATIVE_COUNT, symbol=n, detail=str(c)))
    mass = sum(table.counts)
    if mass != table.total:
        issues.append(Issue(IssueKind.TOTAL_MISMATCH, detail=f"counts sum to {mass}, total is {table.total}"))
    if table.total > MAX_TOTAL:
        issues.append(Issue(IssueKind.TOTAL_TOO_LARGE, detail=f"{table.total} > {MAX_TOTAL}"))
    if not any(c > 0 for c in table.counts):
        issues.append(Issue(IssueKind.ALL_ZERO))
    return issues


# ========== Sidecar format ==========

_TOTAL_LINE = re.compile(r"^total\s+(\d+)$")
_COUNT_LINE = re.compile(r"^(\d+)\s+(\d+)$")


def format_model_file(table: ProbabilityTable) -> str:
    """Render a table as ``total <T>`` followed by ``index count`` lines."""
    lines = [f"total {table.total}"]
    lines.extend(f"{n} {c}" for n, c in enumerate(table.counts))
    return "\n".join(lines) + "\n"


def parse_model_file(text: str | bytes) -> ProbabilityTable:
    """
    Parse a model sidecar.

    Symbols without a line get count 0; the alphabet is 0..max index.

    Raises:
        ModelSyntaxError: On a malformed, duplicate or missing line
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ModelSyntaxError(0, f"not UTF-8 ({exc.reason})") from exc

    total: int | None = None
    found: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if total is None:
            match = _TOTAL_LINE.match(line)
            if not match:
                raise ModelSyntaxError(lineno, raw)
            total = int(match.group(1))
            continue
        match = _COUNT_LINE.match(line)
        if not match:
            raise ModelSyntaxError(lineno, raw)
        symbol, count = int(match.group(1)), int(match.group(2))
        if symbol in found:
            raise ModelSyntaxError(lineno, raw)
        found[symbol] = count

    if total is None or not found:
        raise ModelSyntaxError(0, "missing 'total' header or count lines")
    counts = tuple(found.get(n, 0) for n in range(max(found) + 1))
    return ProbabilityTable(counts=counts, total=total)
