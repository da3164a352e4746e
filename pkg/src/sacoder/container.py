"""
Self-describing byte container for stream-coded payloads.

Layout (big-endian): magic "SAC1", version u8, mode u8, m u64,
alphabet size u16, K u16, K member lists (u16 count then u16 indexes),
table total u32, alphabet-size u16 counts, digest u64,
payload bit count u64, payload bytes zero-padded to a byte boundary.
"""

import struct
from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property

from bitarray import bitarray, frozenbitarray

from sacoder.errors import ContainerError, DigestMismatchError, TruncatedPayloadError
from sacoder.model import Alphabet, ProbabilityTable, validate
from sacoder.synonymy import SynonymousPartition, validate_partition
from sacoder.validator import ensure_valid

MAGIC = b"SAC1"
VERSION = 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1
_U16_MAX = 0xFFFF


class CodingMode(StrEnum):
    SYNTACTIC = "syntactic"
    SEMANTIC = "semantic"


_MODE_CODES = {CodingMode.SYNTACTIC: 0, CodingMode.SEMANTIC: 1}
_MODES_BY_CODE = {code: mode for mode, code in _MODE_CODES.items()}


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def _pack_body(mode: CodingMode, length: int, partition: SynonymousPartition, table: ProbabilityTable) -> bytes:
    """Header bytes from the mode byte through the last table count."""
    reduced = table.reduced()
    if table.size > _U16_MAX or partition.num_sets > _U16_MAX:
        raise ContainerError("Alphabet or partition too large for the container")
    if any(c > _U16_MAX for c in reduced.counts):
        raise ContainerError("Table counts do not fit in 16 bits")

    parts = [struct.pack(">BQHH", _MODE_CODES[mode], length, table.size, partition.num_sets)]
    for members in partition.sets:
        parts.append(struct.pack(f">H{len(members)}H", len(members), *members))
    parts.append(struct.pack(f">I{reduced.size}H", reduced.total, *reduced.counts))
    return b"".join(parts)


def compute_digest(
    mode: CodingMode, length: int, partition: SynonymousPartition, table: ProbabilityTable, payload_bits: int
) -> int:
    """Digest binding the synchronized state (partition, model, m, mode) to the payload length."""
    return fnv1a64(_pack_body(mode, length, partition, table) + struct.pack(">Q", payload_bits))


@dataclass(frozen=True)
class Container:
    """Everything a decoder needs: mode, m, partition, model and the payload bits."""

    mode: CodingMode
    length: int
    partition: SynonymousPartition
    table: ProbabilityTable
    payload: frozenbitarray

    @property
    def payload_bit_count(self) -> int:
        return len(self.payload)

    @property
    def alphabet_size(self) -> int:
        return self.table.size

    @cached_property
    def digest(self) -> int:
        return compute_digest(self.mode, self.length, self.partition, self.table, self.payload_bit_count)

    def to_bytes(self) -> bytes:
        body = _pack_body(self.mode, self.length, self.partition, self.table)
        head = MAGIC + struct.pack(">B", VERSION)
        tail = struct.pack(">QQ", self.digest, self.payload_bit_count)
        return head + body + tail + self.payload.tobytes()

    @property
    def header_bytes(self) -> int:
        """Container size minus the payload bytes."""
        return len(self.to_bytes()) - (self.payload_bit_count + 7) // 8

    @classmethod
    def from_bytes(cls, data: bytes) -> "Container":
        """
        Parse and integrity-check a container.

        Raises:
            ContainerError: Wrong magic/version, unknown mode or trailing bytes
            TruncatedPayloadError: The data ends inside the header or payload
            DigestMismatchError: The stored digest does not match the header
        """
        reader = _Reader(data)
        if reader.take(len(MAGIC)) != MAGIC:
            raise ContainerError("Not a SAC container (bad magic)")
        (version,) = reader.unpack(">B")
        if version != VERSION:
            raise ContainerError(f"Unsupported container version {version}")

        body_start = reader.pos
        mode_code, length, alphabet_size, num_sets = reader.unpack(">BQHH")
        sets = []
        for _ in range(num_sets):
            (count,) = reader.unpack(">H")
            sets.append(tuple(reader.unpack(f">{count}H")))
        (total,) = reader.unpack(">I")
        counts = reader.unpack(f">{alphabet_size}H")
        body_end = reader.pos
        digest, payload_bits = reader.unpack(">QQ")

        expected = fnv1a64(data[body_start:body_end] + struct.pack(">Q", payload_bits))
        if digest != expected:
            raise DigestMismatchError(f"Header digest {digest:#018x} does not match {expected:#018x}")

        mode = _MODES_BY_CODE.get(mode_code)
        if mode is None:
            raise ContainerError(f"Unknown coding mode {mode_code}")

        nbytes = (payload_bits + 7) // 8
        raw = reader.take(nbytes)
        if reader.pos != len(data):
            raise ContainerError(f"{len(data) - reader.pos} trailing bytes after the payload")
        payload = bitarray()
        payload.frombytes(raw)
        if payload[payload_bits:].any():
            raise ContainerError("Non-zero padding after the payload")
        del payload[payload_bits:]

        partition = SynonymousPartition(sets=tuple(sets))
        table = ProbabilityTable(counts=tuple(counts), total=total)
        alphabet = Alphabet(max(alphabet_size, 1))
        ensure_valid("container model", validate(table, alphabet))
        ensure_valid("container partition", validate_partition(partition, alphabet))
        return cls(mode=mode, length=length, partition=partition, table=table, payload=frozenbitarray(payload))


class _Reader:
    """Cursor over container bytes; running short means a truncated container."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedPayloadError(f"Container ends at byte {len(self.data)}, needed {self.pos + n}")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str) -> tuple[int, ...]:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))
