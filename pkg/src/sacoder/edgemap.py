"""
Binary edge maps: PBM I/O, 2x2 block tokenization and corpus statistics.

Each non-overlapping 2x2 pixel block becomes one symbol of a 16-letter
alphabet, scanned row-major:

    symbol = 8*TL + 4*TR + 2*BL + 1*BR
"""

import re
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from sacoder.errors import AllZeroError, LengthMismatchError, MalformedPbmError, OddDimensionsError
from sacoder.model import DEFAULT_TOTAL, ProbabilityTable, quantize

BLOCK_ALPHABET = 16

_WHITESPACE = b" \t\n\r\v\f"
_COMMENT = re.compile(rb"#[^\n]*")
_PLAIN_JUNK = re.compile(rb"[^01\s]")
_PLAIN_ROW_CHARS = 70


@dataclass(frozen=True, eq=False)
class EdgeMap:
    """Binary image, 1 = edge pixel; ``bits`` is a uint8 array of shape (height, width)."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise ValueError(f"Edge map must be 2-D, got shape {bits.shape}")
        if bits.size and bits.max() > 1:
            raise ValueError("Edge map values must be 0 or 1")
        height, width = bits.shape
        if width % 2 or height % 2:
            raise OddDimensionsError(width, height)
        object.__setattr__(self, "bits", bits)

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EdgeMap):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.bits.shape, self.bits.tobytes()))


@dataclass(frozen=True, eq=False)
class BlockSequence:
    """Row-major block symbols of an edge map with their grid dimensions."""

    symbols: np.ndarray
    blocks_wide: int
    blocks_high: int

    def __post_init__(self) -> None:
        symbols = np.asarray(self.symbols, dtype=np.uint8).reshape(-1)
        if len(symbols) != self.blocks_wide * self.blocks_high:
            raise LengthMismatchError(
                f"{len(symbols)} symbols do not fill a {self.blocks_wide}x{self.blocks_high} block grid"
            )
        if symbols.size and symbols.max() >= BLOCK_ALPHABET:
            raise ValueError(f"Block symbols must be below {BLOCK_ALPHABET}")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlockSequence):
            return NotImplemented
        return (self.blocks_wide, self.blocks_high) == (other.blocks_wide, other.blocks_high) and bool(
            np.array_equal(self.symbols, other.symbols)
        )

    def __hash__(self) -> int:
        return hash((self.blocks_wide, self.blocks_high, self.symbols.tobytes()))

    def tolist(self) -> list[int]:
        return self.symbols.tolist()


# ========== PBM ==========


def _skip_space_and_comments(data: bytes, pos: int) -> int:
    while pos < len(data):
        if data[pos] in _WHITESPACE:
            pos += 1
        elif data[pos] == ord("#"):
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        else:
            break
    return pos


def _read_header_int(data: bytes, pos: int, what: str) -> tuple[int, int]:
    pos = _skip_space_and_comments(data, pos)
    start = pos
    while pos < len(data) and data[pos : pos + 1].isdigit():
        pos += 1
    if pos == start:
        raise MalformedPbmError(start, f"expected {what}")
    return int(data[start:pos]), pos


def parse_pbm(data: bytes) -> EdgeMap:
    """
    Parse a plain (P1) or raw (P4) PBM image.

    Raises:
        MalformedPbmError: Wrong magic, bad header or pixel data of the wrong size
        OddDimensionsError: Width or height is odd
    """
    magic = data[:2]
    if magic not in (b"P1", b"P4"):
        raise MalformedPbmError(0, f"unsupported magic {magic!r}, expected P1 or P4")
    width, pos = _read_header_int(data, 2, "width")
    height, pos = _read_header_int(data, pos, "height")
    if width % 2 or height % 2:
        raise OddDimensionsError(width, height)

    if magic == b"P1":
        bits = _parse_plain_pixels(data, pos, width, height)
    else:
        if pos >= len(data) or data[pos] not in _WHITESPACE:
            raise MalformedPbmError(pos, "expected a single whitespace byte before the raster")
        bits = _parse_raw_pixels(data, pos + 1, width, height)
    return EdgeMap(bits)


def _parse_plain_pixels(data: bytes, pos: int, width: int, height: int) -> np.ndarray:
    body = _COMMENT.sub(lambda m: b" " * len(m.group()), data[pos:])
    junk = _PLAIN_JUNK.search(body)
    if junk:
        raise MalformedPbmError(pos + junk.start(), f"unexpected byte {body[junk.start() : junk.start() + 1]!r}")
    digits = body.translate(None, _WHITESPACE)
    if len(digits) != width * height:
        raise MalformedPbmError(len(data), f"expected {width * height} pixels, found {len(digits)}")
    return (np.frombuffer(digits, dtype=np.uint8) - ord("0")).reshape(height, width)


def _parse_raw_pixels(data: bytes, pos: int, width: int, height: int) -> np.ndarray:
    row_bytes = (width + 7) // 8
    expected = row_bytes * height
    raster = data[pos:]
    if len(raster) != expected:
        offset = pos + min(len(raster), expected)
        raise MalformedPbmError(offset, f"expected {expected} raster bytes, found {len(raster)}")
    packed = np.frombuffer(raster, dtype=np.uint8).reshape(height, row_bytes)
    return np.unpackbits(packed, axis=1)[:, :width]


def format_pbm(edge_map: EdgeMap, raw: bool = False) -> bytes:
    """Serialize as P4 (``raw``) or P1; ``parse_pbm`` reads either back unchanged."""
    header = f"{'P4' if raw else 'P1'}\n{edge_map.width} {edge_map.height}\n".encode("ascii")
    if raw:
        return header + np.packbits(edge_map.bits, axis=1).tobytes()

    lines = []
    for row in (edge_map.bits + ord("0")).astype(np.uint8):
        text = row.tobytes()
        lines.extend(text[i : i + _PLAIN_ROW_CHARS] for i in range(0, len(text), _PLAIN_ROW_CHARS))
    return header + b"\n".join(lines) + (b"\n" if lines else b"")


# ========== Tokenization ==========


def tokenize_blocks(edge_map: EdgeMap) -> BlockSequence:
    """Split an edge map into row-major 2x2 block symbols."""
    b = edge_map.bits
    symbols = (b[0::2, 0::2] << 3) | (b[0::2, 1::2] << 2) | (b[1::2, 0::2] << 1) | b[1::2, 1::2]
    return BlockSequence(symbols.reshape(-1), edge_map.width // 2, edge_map.height // 2)


def detokenize(blocks: BlockSequence) -> EdgeMap:
    """Inverse of ``tokenize_blocks``."""
    grid = blocks.symbols.reshape(blocks.blocks_high, blocks.blocks_wide)
    bits = np.empty((2 * blocks.blocks_high, 2 * blocks.blocks_wide), dtype=np.uint8)
    bits[0::2, 0::2] = (grid >> 3) & 1
    bits[0::2, 1::2] = (grid >> 2) & 1
    bits[1::2, 0::2] = (grid >> 1) & 1
    bits[1::2, 1::2] = grid & 1
    return EdgeMap(bits)


def reshape_blocks(symbols: Iterable[int], pixel_width: int) -> BlockSequence:
    """
    Lay a flat symbol sequence out as a block grid of the given pixel width.

    Raises:
        OddDimensionsError: If ``pixel_width`` is odd or not positive
        LengthMismatchError: If the symbols do not fill whole block rows
    """
    if pixel_width <= 0 or pixel_width % 2:
        raise OddDimensionsError(pixel_width, 0)
    flat = np.fromiter((int(s) for s in symbols), dtype=np.uint8)
    wide = pixel_width // 2
    if len(flat) % wide:
        raise LengthMismatchError(f"{len(flat)} blocks do not fill rows of {wide} blocks (width {pixel_width})")
    return BlockSequence(flat, wide, len(flat) // wide)


# ========== Statistics ==========


def block_counts(sequences: Iterable[BlockSequence]) -> np.ndarray:
    """Occurrences of each of the 16 block symbols across ``sequences``."""
    counts = np.zeros(BLOCK_ALPHABET, dtype=np.int64)
    for seq in sequences:
        counts += np.bincount(seq.symbols, minlength=BLOCK_ALPHABET)
    return counts


def estimate_model(sequences: BlockSequence | Iterable[BlockSequence], total: int = DEFAULT_TOTAL) -> ProbabilityTable:
    """
    Frequency model over the block alphabet, quantized to ``total``.

    Only observed symbols get a positive count.

    Raises:
        AllZeroError: If the sequences hold no symbols
    """
    if isinstance(sequences, BlockSequence):
        sequences = [sequences]
    counts = block_counts(sequences)
    mass = int(counts.sum())
    if mass == 0:
        raise AllZeroError("Cannot estimate a model from an empty corpus")
    return quantize([Fraction(int(c), mass) for c in counts], total)


# ========== Synthetic corpus ==========


def _draw_segment(bits: np.ndarray, x0: float, y0: float, x1: float, y1: float) -> None:
    steps = int(max(abs(x1 - x0), abs(y1 - y0))) + 1
    xs = np.rint(np.linspace(x0, x1, steps + 1)).astype(np.int64)
    ys = np.rint(np.linspace(y0, y1, steps + 1)).astype(np.int64)
    height, width = bits.shape
    inside = (xs >= 0) & (xs < width) & (ys >= 0) & (ys < height)
    bits[ys[inside], xs[inside]] = 1


def generate_edge_map(
    width: int, height: int, rng: np.random.Generator, polygons: tuple[int, int] = (3, 8)
) -> EdgeMap:
    """
    Random polygon outlines rasterized as 1-pixel edges.

    Args:
        width: Even pixel width
        height: Even pixel height
        rng: Source of randomness
        polygons: Inclusive range for the number of outlines
    """
    if width % 2 or height % 2:
        raise OddDimensionsError(width, height)
    bits = np.zeros((height, width), dtype=np.uint8)
    short_side = min(width, height)
    for _ in range(int(rng.integers(polygons[0], polygons[1] + 1))):
        cx, cy = rng.uniform(0, width), rng.uniform(0, height)
        radius = rng.uniform(0.05, 0.3) * short_side
        sides = int(rng.integers(3, 9))
        angles = np.sort(rng.uniform(0, 2 * np.pi, sides))
        radii = radius * rng.uniform(0.6, 1.0, sides)
        xs = cx + radii * np.cos(angles)
        ys = cy + radii * np.sin(angles)
        for i in range(sides):
            j = (i + 1) % sides
            _draw_segment(bits, xs[i], ys[i], xs[j], ys[j])
    return EdgeMap(bits)


def generate_corpus(count: int, width: int, height: int, seed: int = 0) -> list[EdgeMap]:
    """Deterministic synthetic corpus; map ``i`` depends only on ``seed`` and ``i``."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [generate_edge_map(width, height, np.random.default_rng(child)) for child in children]
