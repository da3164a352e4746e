"""
Exact-rational semantic arithmetic coder.

Reference implementation of the interval-update encoder and decoder over
synonymous sets, with the literal shortest-binary-fraction codeword. It is
slow and its state grows with the sequence length; it exists to check the
code-length bound and to cross-check the fixed-precision stream coder.
"""

import math
from bisect import bisect_right
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from bitarray import bitarray

from sacoder.errors import DesyncError, LengthMismatchError, OutOfRangeError, ZeroProbabilityError
from sacoder.model import ProbabilityTable
from sacoder.reconstruct import ExportPolicy, export_value
from sacoder.synonymy import SynonymousPartition

PartitionSpec = SynonymousPartition | Sequence[SynonymousPartition]

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class ExactInterval:
    """The live coding interval [low, low + length)."""

    low: Fraction = _ZERO
    length: Fraction = _ONE

    @property
    def high(self) -> Fraction:
        return self.low + self.length


@dataclass(frozen=True)
class LengthBoundCheck:
    """Codeword length against the -log2 q + 2 bound."""

    code_length: int
    bound: float
    holds: bool


def update_interval(
    iv: ExactInterval, cum_below: Fraction, p_set: Fraction, position: int | None = None
) -> ExactInterval:
    """
    Narrow ``iv`` to the sub-interval of a set with cumulative mass ``cum_below`` and mass ``p_set``.

    The offset is scaled by the current length, so intervals nest.

    Raises:
        ZeroProbabilityError: If ``p_set`` is zero
    """
    if p_set == 0:
        raise ZeroProbabilityError(position)
    if cum_below < 0 or p_set < 0 or cum_below + p_set > 1:
        raise ValueError(f"Bracket [{cum_below}, {cum_below + p_set}) is not inside [0, 1)")
    return ExactInterval(low=iv.low + iv.length * cum_below, length=iv.length * p_set)


def shortest_fraction(low: Fraction, high: Fraction) -> bitarray:
    """
    Shortest bitstring whose binary fraction lies in [low, high).

    Dyadic levels are searched from length 0 upward and the first (smallest)
    grid point inside the interval wins. The empty string stands for 0.
    """
    if not 0 <= low < high <= 1:
        raise ValueError(f"Not a sub-interval of [0, 1): [{low}, {high})")
    denom = math.lcm(low.denominator, high.denominator)
    a = low.numerator * (denom // low.denominator)
    b = high.numerator * (denom // high.denominator)
    length = 0
    while True:
        # smallest j with j / 2^length >= low
        j = -((-a << length) // denom)
        if j * denom < b << length:
            return bitarray(format(j, f"0{length}b")) if length else bitarray()
        length += 1


def fraction_of(bits: bitarray | str) -> Fraction:
    """Value of a bitstring read as a binary fraction 0.b1 b2 ..."""
    text = bits if isinstance(bits, str) else bits.to01()
    if not text:
        return _ZERO
    return Fraction(int(text, 2), 1 << len(text))


def _partition_at(partitions: PartitionSpec, i: int) -> SynonymousPartition:
    if isinstance(partitions, SynonymousPartition):
        return partitions
    if i >= len(partitions):
        raise LengthMismatchError(f"No partition supplied for position {i}")
    return partitions[i]


class _Brackets:
    """Cumulative set probabilities, computed once per distinct partition."""

    def __init__(self, table: ProbabilityTable):
        self.table = table
        self._cache: dict[int, list[Fraction]] = {}

    def __call__(self, partition: SynonymousPartition) -> list[Fraction]:
        cum = self._cache.get(id(partition))
        if cum is None:
            cum = [_ZERO]
            for members in partition.sets:
                for n in members:
                    if n >= self.table.size:
                        raise OutOfRangeError(n, limit=self.table.size)
                mass = sum(self.table.counts[n] for n in members)
                cum.append(cum[-1] + Fraction(mass, self.table.total))
            self._cache[id(partition)] = cum
        return cum


def exact_interval(
    u: Sequence[int], partitions: PartitionSpec, table: ProbabilityTable
) -> tuple[ExactInterval, list[int]]:
    """
    Run the encoder's interval updates.

    Returns:
        The final interval (its length is the probability q of the set
        sequence) and the set sequence itself

    Raises:
        OutOfRangeError: If a symbol belongs to no set
        ZeroProbabilityError: If a visited set has zero probability
    """
    brackets = _Brackets(table)
    iv = ExactInterval()
    sets: list[int] = []
    for i, symbol in enumerate(u):
        partition = _partition_at(partitions, i)
        k = partition.set_of.get(int(symbol))
        if k is None:
            raise OutOfRangeError(int(symbol), position=i, limit=partition.alphabet_size)
        cum = brackets(partition)
        p_set = cum[k + 1] - cum[k]
        if p_set == 0:
            raise ZeroProbabilityError(i, int(symbol))
        iv = update_interval(iv, cum[k], p_set, position=i)
        sets.append(k)
    return iv, sets


def encode_exact(u: Sequence[int], partitions: PartitionSpec, table: ProbabilityTable) -> bitarray:
    """Encode a symbol sequence as the shortest binary fraction inside its set-sequence interval."""
    iv, _ = exact_interval(u, partitions, table)
    return shortest_fraction(iv.low, iv.high)


def decode_exact(
    bits: bitarray | str,
    m: int,
    partitions: PartitionSpec,
    table: ProbabilityTable,
    policy: ExportPolicy | None = None,
) -> list[int]:
    """
    Decode ``m`` positions from an exact codeword.

    Each set is the one whose cumulative bracket holds (c - low) / length;
    the exported symbol is chosen from that set by ``policy``.

    Raises:
        DesyncError: If the codeword falls outside the decoding interval
    """
    policy = policy or ExportPolicy()
    draw = policy.draw_state()
    brackets = _Brackets(table)
    c = fraction_of(bits)
    iv = ExactInterval()
    out: list[int] = []
    for i in range(m):
        partition = _partition_at(partitions, i)
        cum = brackets(partition)
        t = (c - iv.low) / iv.length
        if not 0 <= t < 1:
            raise DesyncError(f"Codeword left the decoding interval at position {i}")
        k = bisect_right(cum, t) - 1
        if k >= partition.num_sets:
            raise DesyncError(f"No synonymous set brackets position {i}")
        iv = update_interval(iv, cum[k], cum[k + 1] - cum[k], position=i)
        out.append(export_value(k, partition, table, policy, draw))
    if not iv.low <= c < iv.high:
        raise DesyncError("Codeword lies outside the final decoding interval")
    return out


def check_length_bound(u: Sequence[int], partitions: PartitionSpec, table: ProbabilityTable) -> LengthBoundCheck:
    """Compare the exact codeword length with -log2 q + 2."""
    iv, _ = exact_interval(u, partitions, table)
    code_length = len(shortest_fraction(iv.low, iv.high))
    q = iv.length
    bound = math.log2(q.denominator) - math.log2(q.numerator) + 2
    # exact form of code_length <= -log2 q + 2
    holds = q * Fraction(2) ** (code_length - 2) <= 1
    return LengthBoundCheck(code_length=code_length, bound=bound, holds=holds)


def ideal_code_length(u: Sequence[int], partitions: PartitionSpec, table: ProbabilityTable) -> float:
    """-log2 q for the set sequence of ``u``."""
    iv, _ = exact_interval(u, partitions, table)
    return math.log2(iv.length.denominator) - math.log2(iv.length.numerator)
