"""
Fixed-precision arithmetic coder over synonymous sets or raw symbols.

Semantic mode codes the set sequence of the input; syntactic mode codes the
symbols themselves and is the traditional arithmetic-coding baseline. With
a singleton partition the two modes produce identical payloads.

The coder keeps a 32-bit [low, high] state, emits settled bits as soon as
the top bits of low and high agree, and counts pending bits while the
interval straddles the midpoint. After renormalization high - low + 1 is
above 2^30, so with totals capped at 2^16 every non-zero count keeps a
non-empty sub-interval.
"""

from bisect import bisect_right
from collections.abc import Sequence
from dataclasses import dataclass

from bitarray import bitarray, frozenbitarray

from sacoder.container import CodingMode, Container, compute_digest
from sacoder.errors import DesyncError, DigestMismatchError, OutOfRangeError, ZeroProbabilityError
from sacoder.model import Alphabet, ProbabilityTable, validate
from sacoder.reconstruct import ExportPolicy, export_sequence
from sacoder.synonymy import SynonymousPartition, set_masses, to_set_sequence, validate_partition
from sacoder.validator import ensure_valid

STATE_BITS = 32
_FULL = 1 << STATE_BITS
_MASK = _FULL - 1
_HALF = _FULL >> 1
_QUARTER = _HALF >> 1

# Upper bound on termination overhead; the flush itself emits at most one bit.
MAX_FLUSH_BITS = 48


@dataclass(frozen=True)
class CodingTable:
    """Cumulative counts over coding indexes (sets or symbols) plus the symbol -> index map."""

    cum: tuple[int, ...]
    total: int
    index_of: tuple[int, ...]

    @classmethod
    def build(cls, partition: SynonymousPartition, table: ProbabilityTable, mode: CodingMode) -> "CodingTable":
        if mode is CodingMode.SEMANTIC:
            freqs = set_masses(partition, table)
            index_of = tuple(partition.set_of[n] for n in range(table.size))
        else:
            freqs = list(table.counts)
            index_of = tuple(range(table.size))
        cum = [0]
        for f in freqs:
            cum.append(cum[-1] + f)
        return cls(cum=tuple(cum), total=table.total, index_of=index_of)


class StreamEncoder:
    """Bitwise renormalizing arithmetic encoder."""

    def __init__(self) -> None:
        self.low = 0
        self.high = _MASK
        self.pending = 0
        self.bits = bitarray()

    def encode(self, cum_low: int, cum_high: int, total: int) -> None:
        low, high = self.low, self.high
        span = high - low + 1
        high = low + cum_high * span // total - 1
        low = low + cum_low * span // total

        bits = self.bits
        pending = self.pending
        while not (low ^ high) & _HALF:
            bit = low >> (STATE_BITS - 1)
            bits.append(bit)
            if pending:
                bits.extend((bit ^ 1,) * pending)
                pending = 0
            low = (low << 1) & _MASK
            high = ((high << 1) & _MASK) | 1
        while low & ~high & _QUARTER:
            pending += 1
            low = (low << 1) & (_MASK >> 1)
            high = ((high << 1) & (_MASK >> 1)) | _HALF | 1

        self.low, self.high, self.pending = low, high, pending

    def finish(self) -> frozenbitarray:
        """
        Terminate the stream.

        The decoder reads zeros past the end, so an interval starting at 0
        needs nothing more and any other needs a single 1 bit (the pending
        bits after it are zeros and stay implicit).
        """
        if self.low != 0 or self.pending:
            self.bits.append(1)
        self.pending = 0
        return frozenbitarray(self.bits)


class StreamDecoder:
    """Mirror of StreamEncoder reading a finite payload followed by implicit zeros."""

    def __init__(self, payload: bitarray):
        self.payload = payload
        self.nbits = len(payload)
        self.pos = 0
        self.low = 0
        self.high = _MASK
        self.code = 0
        for _ in range(STATE_BITS):
            self.code = (self.code << 1) | self._next_bit()

    def _next_bit(self) -> int:
        pos = self.pos
        self.pos += 1
        return self.payload[pos] if pos < self.nbits else 0

    def decode(self, cum: Sequence[int], total: int) -> int:
        low, high, code = self.low, self.high, self.code
        if not low <= code <= high:
            raise DesyncError("Code value left the decoding interval")
        span = high - low + 1
        value = ((code - low + 1) * total - 1) // span
        index = bisect_right(cum, value) - 1
        if index >= len(cum) - 1:
            raise DesyncError(f"Code value {value} is beyond the cumulative total {total}")

        high = low + cum[index + 1] * span // total - 1
        low = low + cum[index] * span // total
        while not (low ^ high) & _HALF:
            code = ((code << 1) & _MASK) | self._next_bit()
            low = (low << 1) & _MASK
            high = ((high << 1) & _MASK) | 1
        while low & ~high & _QUARTER:
            code = (code & _HALF) | ((code << 1) & (_MASK >> 1)) | self._next_bit()
            low = (low << 1) & (_MASK >> 1)
            high = ((high << 1) & (_MASK >> 1)) | _HALF | 1

        self.low, self.high, self.code = low, high, code
        return index


def _check_inputs(partition: SynonymousPartition, table: ProbabilityTable) -> None:
    alphabet = Alphabet(max(table.size, 1))
    ensure_valid("model", validate(table, alphabet))
    ensure_valid("partition", validate_partition(partition, alphabet))


def encode_stream(
    u: Sequence[int],
    partition: SynonymousPartition,
    table: ProbabilityTable,
    mode: CodingMode = CodingMode.SEMANTIC,
) -> Container:
    """
    Encode a symbol sequence into a self-describing container.

    Raises:
        ValidationError: If the table or partition is invalid
        OutOfRangeError: If a symbol is outside the alphabet
        ZeroProbabilityError: If a visited set (semantic) or symbol (syntactic) has count zero
    """
    _check_inputs(partition, table)
    coding = CodingTable.build(partition, table, mode)
    cum, total, index_of = coding.cum, coding.total, coding.index_of
    size = len(index_of)

    encoder = StreamEncoder()
    m = 0
    for i, raw in enumerate(u):
        symbol = int(raw)
        if not 0 <= symbol < size:
            raise OutOfRangeError(symbol, position=i, limit=size)
        index = index_of[symbol]
        cum_low, cum_high = cum[index], cum[index + 1]
        if cum_low == cum_high:
            raise ZeroProbabilityError(i, symbol)
        encoder.encode(cum_low, cum_high, total)
        m += 1

    return Container(mode=mode, length=m, partition=partition, table=table, payload=encoder.finish())


def decode_indexes(container: Container) -> list[int]:
    """Decode the container's coding indexes: set indexes (semantic) or symbols (syntactic)."""
    coding = CodingTable.build(container.partition, container.table, container.mode)
    decoder = StreamDecoder(container.payload)
    cum, total = coding.cum, coding.total
    return [decoder.decode(cum, total) for _ in range(container.length)]


def decode_stream(
    container: Container,
    partition: SynonymousPartition | None = None,
    table: ProbabilityTable | None = None,
    policy: ExportPolicy | None = None,
) -> list[int]:
    """
    Decode a container to a symbol sequence.

    Without ``partition``/``table`` the inline copies are used; when given,
    they must match the container digest. Semantic mode reproduces the set
    sequence and exports a member per position with ``policy``; syntactic
    mode reproduces the symbols exactly.

    Raises:
        DigestMismatchError: Supplied partition/table differ from the encoder's
        DesyncError: The payload does not decode consistently
    """
    if partition is not None or table is not None:
        partition = partition or container.partition
        table = table or container.table
        supplied = compute_digest(container.mode, container.length, partition, table, container.payload_bit_count)
        if supplied != container.digest:
            raise DigestMismatchError("Supplied partition/model do not match the container")
    partition = partition or container.partition
    table = table or container.table

    indexes = decode_indexes(container)
    if container.mode is CodingMode.SYNTACTIC:
        return indexes
    return export_sequence(indexes, partition, table, policy or ExportPolicy())


def set_sequence_of(symbols: Sequence[int], partition: SynonymousPartition) -> list[int]:
    """Set sequence of decoded symbols, for semantic comparisons."""
    return to_set_sequence(symbols, partition)


def measure_code_length(container: Container) -> int:
    """Payload length in sebits; header bytes are reported separately."""
    return container.payload_bit_count
