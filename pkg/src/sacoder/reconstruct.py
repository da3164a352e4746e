"""
Decoder-side export of a concrete symbol from each decoded synonymous set.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

from sacoder.errors import OutOfRangeError, ZeroMassSetError
from sacoder.model import ProbabilityTable
from sacoder.synonymy import SynonymousPartition

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """
    64-bit SplitMix generator.

    Seed 0 yields 0xE220A8397B1DCDAF as its first output.
    """

    def __init__(self, seed: int = 0):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform-ish integer in [0, bound) by multiply-shift."""
        return (self.next_u64() * bound) >> 64


class ExportKind(StrEnum):
    CANONICAL = "canonical"
    ARGMAX = "argmax"
    WEIGHTED_RANDOM = "random"


@dataclass(frozen=True)
class ExportPolicy:
    """How a decoder picks a member of a decoded set; ``seed`` only matters for random."""

    kind: ExportKind = ExportKind.CANONICAL
    seed: int = 0

    def draw_state(self) -> SplitMix64:
        return SplitMix64(self.seed)


def _members(partition: SynonymousPartition, set_index: int) -> tuple[int, ...]:
    if not 0 <= set_index < partition.num_sets:
        raise OutOfRangeError(set_index, limit=partition.num_sets)
    members = partition.sets[set_index]
    if not members:
        raise ZeroMassSetError(f"Set {set_index} is empty")
    return members


def export_value(
    set_index: int,
    partition: SynonymousPartition,
    table: ProbabilityTable,
    policy: ExportPolicy,
    draw: SplitMix64 | None = None,
) -> int:
    """
    Pick the symbol to output for a decoded set.

    canonical returns the lowest member; argmax the highest-count member
    (ties to the lowest index); random draws a member with probability
    proportional to its count, consuming one value from ``draw``.

    Raises:
        ZeroMassSetError: For argmax/random on a set whose counts are all zero
    """
    members = _members(partition, set_index)
    if policy.kind is ExportKind.CANONICAL:
        return min(members)

    counts = [table.counts[n] for n in members]
    mass = sum(counts)
    if mass == 0:
        raise ZeroMassSetError(f"Set {set_index} has zero probability mass; use the canonical policy")

    if policy.kind is ExportKind.ARGMAX:
        return max(members, key=lambda n: (table.counts[n], -n))

    if draw is None:
        raise ValueError("Random export needs a draw state")
    target = draw.below(mass)
    for symbol, count in zip(members, counts, strict=True):
        if target < count:
            return symbol
        target -= count
    raise AssertionError("unreachable: target below set mass")


def export_sequence(
    set_sequence: Sequence[int],
    partition: SynonymousPartition,
    table: ProbabilityTable,
    policy: ExportPolicy,
) -> list[int]:
    """Export every position of a set sequence, one draw per position for random."""
    if policy.kind is not ExportKind.WEIGHTED_RANDOM:
        # canonical/argmax choices depend only on the set, so pick once per set
        choice: dict[int, int] = {}
        out = []
        for k in set_sequence:
            symbol = choice.get(k)
            if symbol is None:
                symbol = choice[k] = export_value(k, partition, table, policy)
            out.append(symbol)
        return out

    draw = policy.draw_state()
    return [export_value(k, partition, table, policy, draw) for k in set_sequence]
