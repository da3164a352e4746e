"""
Synonymous partitions of a symbol alphabet.

A partition assigns every syntactic symbol to exactly one synonymous set.
Set order is significant: it fixes the cumulative sums used by the coders,
so the partition is part of the state both ends must share.
"""

import math
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from importlib import resources

from sacoder.errors import EmptyPartitionError, OutOfRangeError, PartitionSyntaxError, SacError
from sacoder.model import Alphabet, ProbabilityTable
from sacoder.validator import Issue, IssueKind, ensure_valid

BUILTIN_PARTITIONS = ("edge2x2-11",)

_SET_LINE = re.compile(r"^set\s+([^:\s]+)\s*:\s*(.*)$")


@dataclass(frozen=True)
class SynonymousPartition:
    """Synonymous sets as ascending member tuples; set k is ``sets[k]``."""

    sets: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] | None = None

    @classmethod
    def from_lists(cls, sets: Iterable[Iterable[int]], names: Sequence[str] | None = None) -> "SynonymousPartition":
        return cls(
            sets=tuple(tuple(int(s) for s in members) for members in sets),
            names=tuple(names) if names is not None else None,
        )

    @property
    def num_sets(self) -> int:
        return len(self.sets)

    @property
    def alphabet_size(self) -> int:
        """One past the largest member; equals the alphabet size for a valid partition."""
        return max((max(members) for members in self.sets if members), default=-1) + 1

    @cached_property
    def set_of(self) -> dict[int, int]:
        """Symbol -> set index (first set wins if the partition overlaps)."""
        lookup: dict[int, int] = {}
        for k, members in enumerate(self.sets):
            for symbol in members:
                lookup.setdefault(symbol, k)
        return lookup

    def name_of(self, k: int) -> str:
        if self.names is not None:
            return self.names[k]
        return f"s{k}"


def singleton_partition(size: int) -> SynonymousPartition:
    """Every symbol in its own set; SAC over it is plain arithmetic coding."""
    return SynonymousPartition(sets=tuple((n,) for n in range(size)))


def whole_partition(size: int) -> SynonymousPartition:
    """A single set holding the whole alphabet."""
    return SynonymousPartition(sets=(tuple(range(size)),))


def validate_partition(partition: SynonymousPartition, alphabet: Alphabet) -> list[Issue]:
    """
    Check disjointness, full cover, non-emptiness and sortedness.

    Returns:
        List of issues; empty when the partition is valid
    """
    issues: list[Issue] = []
    seen: set[int] = set()
    overlapping: set[int] = set()

    for k, members in enumerate(partition.sets):
        if not members:
            issues.append(Issue(IssueKind.EMPTY_SET, set_index=k))
            continue
        for prev, cur in zip(members, members[1:], strict=False):
            if cur < prev:
                issues.append(Issue(IssueKind.UNSORTED, set_index=k, detail=f"{prev} before {cur}"))
                break
        for symbol in members:
            if symbol not in alphabet:
                issues.append(Issue(IssueKind.UNKNOWN_SYMBOL, symbol=symbol, set_index=k))
                continue
            if symbol in seen:
                if symbol not in overlapping:
                    overlapping.add(symbol)
                    issues.append(Issue(IssueKind.OVERLAP, symbol=symbol, set_index=k))
                continue
            seen.add(symbol)

    for symbol in range(alphabet.size):
        if symbol not in seen:
            issues.append(Issue(IssueKind.MISSING, symbol=symbol))

    if partition.num_sets > alphabet.size:
        issues.append(Issue(IssueKind.LENGTH_MISMATCH, detail=f"{partition.num_sets} sets > {alphabet.size} symbols"))
    return issues


def set_index_of(partition: SynonymousPartition, symbol: int) -> int:
    """
    Return the index of the set containing ``symbol``.

    Raises:
        OutOfRangeError: If the symbol belongs to no set
    """
    try:
        return partition.set_of[symbol]
    except KeyError:
        raise OutOfRangeError(symbol, limit=partition.alphabet_size) from None


def set_masses(partition: SynonymousPartition, table: ProbabilityTable) -> list[int]:
    """Count mass of every set, in set order."""
    return [sum(table.counts[n] for n in members) for members in partition.sets]


def set_probability(partition: SynonymousPartition, table: ProbabilityTable, k: int) -> Fraction:
    """
    Exact probability of set ``k``: the summed counts of its members over the total.

    Raises:
        OutOfRangeError: If ``k`` is not a set index
    """
    if not 0 <= k < partition.num_sets:
        raise OutOfRangeError(k, limit=partition.num_sets)
    return Fraction(sum(table.counts[n] for n in partition.sets[k]), table.total)


def to_set_sequence(u: Iterable[int], partition: SynonymousPartition) -> list[int]:
    """
    Map a symbol sequence to its set-index sequence.

    Raises:
        OutOfRangeError: With the position of the first unknown symbol
    """
    lookup = partition.set_of
    out: list[int] = []
    for i, symbol in enumerate(u):
        k = lookup.get(int(symbol))
        if k is None:
            raise OutOfRangeError(int(symbol), position=i, limit=partition.alphabet_size)
        out.append(k)
    return out


def entropy_bits(masses: Iterable[int]) -> float:
    """Entropy in bits of the distribution proportional to ``masses`` (0 log 0 = 0)."""
    values = [m for m in masses if m > 0]
    total = sum(values)
    if total == 0:
        return 0.0
    return -sum((m / total) * math.log2(m / total) for m in values) + 0.0


def shannon_entropy(table: ProbabilityTable) -> float:
    """Shannon entropy of the symbol distribution, in bits."""
    return entropy_bits(table.counts)


def semantic_entropy(partition: SynonymousPartition, table: ProbabilityTable) -> float:
    """Entropy of the synonymous-set distribution, in sebits."""
    return entropy_bits(set_masses(partition, table))


# ========== Partition file format ==========


def parse_partition_file(text: str | bytes, alphabet: Alphabet | None = None) -> SynonymousPartition:
    """
    Parse and validate a partition file.

    Lines look like ``set <name>: <idx> <idx> ...``; ``#`` starts a comment
    line. Without an explicit alphabet, the alphabet is 0..max index.

    Raises:
        PartitionSyntaxError: On a malformed line
        EmptyPartitionError: If no sets are defined
        ValidationError: If the parsed partition is invalid
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SacError(f"Partition file is not UTF-8: {exc}") from exc

    names: list[str] = []
    sets: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _SET_LINE.match(line)
        if not match:
            raise PartitionSyntaxError(lineno, raw)
        fields = match.group(2).split()
        if not all(f.isdigit() for f in fields):
            raise PartitionSyntaxError(lineno, raw)
        names.append(match.group(1))
        sets.append(tuple(int(f) for f in fields))

    if not sets:
        raise EmptyPartitionError("Partition file defines no sets")

    partition = SynonymousPartition(sets=tuple(sets), names=tuple(names))
    size = alphabet.size if alphabet is not None else max(partition.alphabet_size, 1)
    ensure_valid("partition", validate_partition(partition, Alphabet(size)))
    return partition


def format_partition_file(partition: SynonymousPartition) -> str:
    """Canonical serialization; ``parse_partition_file`` reads it back unchanged."""
    lines = []
    for k, members in enumerate(partition.sets):
        lines.append(f"set {partition.name_of(k)}: {' '.join(str(n) for n in members)}".rstrip())
    return "\n".join(lines) + "\n"


def load_builtin_partition(name: str = "edge2x2-11") -> SynonymousPartition:
    """Load a partition shipped with the package."""
    if name not in BUILTIN_PARTITIONS:
        raise SacError(f"Unknown built-in partition '{name}'. Available: {', '.join(BUILTIN_PARTITIONS)}")
    text = resources.files("sacoder").joinpath("partitions", f"{name}.txt").read_text(encoding="utf-8")
    return parse_partition_file(text, Alphabet(16))
