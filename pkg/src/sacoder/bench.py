"""
Traditional AC vs SAC comparison over edge-map corpora.

Code lengths are payload bits only; container header bytes are reported
in their own column.
"""

import csv
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import IO

import numpy as np

from sacoder.container import CodingMode
from sacoder.edgemap import BlockSequence, block_counts, estimate_model, parse_pbm, tokenize_blocks
from sacoder.errors import SacError
from sacoder.model import DEFAULT_TOTAL, ProbabilityTable
from sacoder.stream import encode_stream, measure_code_length
from sacoder.synonymy import SynonymousPartition, entropy_bits, semantic_entropy, set_masses, shannon_entropy

CSV_COLUMNS = (
    "file",
    "m",
    "L_AC_sebits",
    "L_SAC_sebits",
    "header_bytes",
    "H_bits_pb",
    "Hs_sebits_pb",
    "avg_AC",
    "avg_SAC",
    "saving_pct",
    "gap_sebits_pb",
    "eps_quant",
    "error",
)
AGGREGATE_LABEL = "(mean)"


class ModelSource(StrEnum):
    POOLED = "pooled"
    PER_FILE = "per-file"


@dataclass(frozen=True)
class CompressionReport:
    """One file's syntactic vs semantic coding result."""

    file: str
    m: int
    l_ac: int
    l_sac: int
    header_bytes: int
    h_bits: float
    hs_sebits: float
    eps_quant: float
    ideal_sac: float
    error: str | None = None

    @classmethod
    def failed(cls, file: str, error: str) -> "CompressionReport":
        return cls(file, 0, 0, 0, 0, 0.0, 0.0, 0.0, 0.0, error=error)

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def avg_ac(self) -> float:
        return self.l_ac / self.m if self.m else 0.0

    @property
    def avg_sac(self) -> float:
        return self.l_sac / self.m if self.m else 0.0

    @property
    def saving(self) -> float:
        """(L_AC - L_SAC) / L_AC; 0 when the baseline is empty."""
        return (self.l_ac - self.l_sac) / self.l_ac if self.l_ac else 0.0

    @property
    def saved_sebits(self) -> int:
        return self.l_ac - self.l_sac

    @property
    def gap(self) -> float:
        """Average SAC length above the semantic entropy of the coding model."""
        return self.avg_sac - self.hs_sebits

    @property
    def overhead(self) -> float:
        """Average SAC length above the ideal length of this sequence under the coding model."""
        return (self.l_sac - self.ideal_sac) / self.m if self.m else 0.0

    @property
    def breaks_shannon(self) -> bool:
        """Whether SAC averages fewer sebits per block than the Shannon entropy in bits."""
        return self.ok and self.m > 0 and self.avg_sac < self.h_bits

    def csv_row(self) -> list[str]:
        if not self.ok:
            return [self.file, *([""] * (len(CSV_COLUMNS) - 2)), self.error or ""]
        return [
            self.file,
            str(self.m),
            str(self.l_ac),
            str(self.l_sac),
            str(self.header_bytes),
            _num(self.h_bits),
            _num(self.hs_sebits),
            _num(self.avg_ac),
            _num(self.avg_sac),
            _num(self.saving * 100),
            _num(self.gap),
            _num(self.eps_quant),
            "",
        ]


def _num(value: float) -> str:
    return format(value, ".12g")


def _symbols_of(u: BlockSequence | Sequence[int]) -> list[int]:
    if isinstance(u, BlockSequence):
        return u.tolist()
    return [int(s) for s in u]


def compare(
    u: BlockSequence | Sequence[int],
    partition: SynonymousPartition,
    table: ProbabilityTable,
    file: str = "",
    raw_counts: Sequence[int] | None = None,
) -> CompressionReport:
    """
    Code ``u`` in both modes with the same model and collect the report fields.

    ``raw_counts`` are the symbol frequencies ``table`` was quantized from;
    ``eps_quant`` measures H_s against them. They default to the counts
    observed in ``u``, which is what a per-file model is built from.
    """
    symbols = _symbols_of(u)
    ac = encode_stream(symbols, partition, table, CodingMode.SYNTACTIC)
    sac = encode_stream(symbols, partition, table, CodingMode.SEMANTIC)

    observed = np.bincount(np.asarray(symbols, dtype=np.int64), minlength=table.size)[: table.size]
    observed_sets = [int(sum(observed[n] for n in members)) for members in partition.sets]
    hs = semantic_entropy(partition, table)
    if raw_counts is None:
        source_sets = observed_sets
    else:
        source_sets = [sum(int(raw_counts[n]) for n in members if n < len(raw_counts)) for members in partition.sets]

    ideal = 0.0
    for count, mass in zip(observed_sets, set_masses(partition, table), strict=True):
        if count:
            ideal += count * (math.log2(table.total) - math.log2(mass))

    return CompressionReport(
        file=file,
        m=len(symbols),
        l_ac=measure_code_length(ac),
        l_sac=measure_code_length(sac),
        header_bytes=sac.header_bytes,
        h_bits=shannon_entropy(table),
        hs_sebits=hs,
        eps_quant=hs - entropy_bits(source_sets),
        ideal_sac=ideal,
    )


# ========== Corpus batch ==========


@dataclass(frozen=True)
class CorpusAggregate:
    """Unweighted per-file means plus length- and block-weighted savings."""

    files: int
    m: float
    l_ac: float
    l_sac: float
    header_bytes: float
    h_bits: float
    hs_sebits: float
    avg_ac: float
    avg_sac: float
    saving: float
    gap: float
    eps_quant: float
    weighted_saving: float
    corpus_saving: float

    def csv_row(self) -> list[str]:
        return [
            AGGREGATE_LABEL,
            _num(self.m),
            _num(self.l_ac),
            _num(self.l_sac),
            _num(self.header_bytes),
            _num(self.h_bits),
            _num(self.hs_sebits),
            _num(self.avg_ac),
            _num(self.avg_sac),
            _num(self.saving * 100),
            _num(self.gap),
            _num(self.eps_quant),
            "",
        ]


@dataclass
class BatchResult:
    """Per-file reports in input order plus the pooled model when one was used."""

    reports: list[CompressionReport]
    model_source: ModelSource
    pooled_table: ProbabilityTable | None = None
    partition: SynonymousPartition | None = field(default=None, repr=False)

    @property
    def succeeded(self) -> list[CompressionReport]:
        return [r for r in self.reports if r.ok]

    @property
    def failed(self) -> list[CompressionReport]:
        return [r for r in self.reports if not r.ok]

    @property
    def aggregate(self) -> CorpusAggregate | None:
        ok = self.succeeded
        if not ok:
            return None

        def mean(get: Callable[[CompressionReport], float]) -> float:
            return sum(get(r) for r in ok) / len(ok)

        blocks = sum(r.m for r in ok)
        l_ac = sum(r.l_ac for r in ok)
        return CorpusAggregate(
            files=len(ok),
            m=mean(lambda r: r.m),
            l_ac=mean(lambda r: r.l_ac),
            l_sac=mean(lambda r: r.l_sac),
            header_bytes=mean(lambda r: r.header_bytes),
            h_bits=mean(lambda r: r.h_bits),
            hs_sebits=mean(lambda r: r.hs_sebits),
            avg_ac=mean(lambda r: r.avg_ac),
            avg_sac=mean(lambda r: r.avg_sac),
            saving=mean(lambda r: r.saving),
            gap=mean(lambda r: r.gap),
            eps_quant=mean(lambda r: r.eps_quant),
            weighted_saving=sum(r.saving * r.m for r in ok) / blocks if blocks else 0.0,
            corpus_saving=1 - sum(r.l_sac for r in ok) / l_ac if l_ac else 0.0,
        )

    @property
    def ideal_saving(self) -> float | None:
        """(H - H_s) / H of the pooled model."""
        if self.pooled_table is None or self.partition is None:
            return None
        h = shannon_entropy(self.pooled_table)
        if h == 0:
            return 0.0
        return (h - semantic_entropy(self.partition, self.pooled_table)) / h


def _load_blocks(path: Path) -> BlockSequence:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise SacError(f"Cannot read {path}: {exc.strerror or exc}") from exc
    return tokenize_blocks(parse_pbm(data))


_Job = tuple[str, BlockSequence, SynonymousPartition, ProbabilityTable, list[int] | None]


def _compare_job(job: _Job) -> CompressionReport:
    name, blocks, partition, table, raw_counts = job
    try:
        return compare(blocks, partition, table, file=name, raw_counts=raw_counts)
    except SacError as exc:
        return CompressionReport.failed(name, f"{type(exc).__name__}: {exc}")


def batch(
    inputs: Sequence[Path],
    partition: SynonymousPartition,
    model_source: ModelSource = ModelSource.POOLED,
    workers: int = 1,
    total: int = DEFAULT_TOTAL,
) -> BatchResult:
    """
    Compare AC and SAC on every input file.

    A file that fails to load or code becomes an error row; the rest of the
    batch continues. Rows keep input order regardless of ``workers``.

    Raises:
        SacError: If ``inputs`` is empty
    """
    if not inputs:
        raise SacError("No input files given")

    loaded: list[BlockSequence | CompressionReport] = []
    for path in inputs:
        try:
            loaded.append(_load_blocks(Path(path)))
        except SacError as exc:
            loaded.append(CompressionReport.failed(str(path), f"{type(exc).__name__}: {exc}"))

    pooled = None
    pooled_counts: list[int] | None = None
    if model_source is ModelSource.POOLED:
        readable = [item for item in loaded if isinstance(item, BlockSequence)]
        if readable and sum(len(b) for b in readable):
            pooled = estimate_model(readable, total)
            pooled_counts = block_counts(readable).tolist()

    jobs: list[_Job] = []
    slots: list[CompressionReport | None] = []
    for path, item in zip(inputs, loaded, strict=True):
        if isinstance(item, CompressionReport):
            slots.append(item)
            continue
        try:
            table = pooled if pooled is not None else estimate_model(item, total)
        except SacError as exc:
            slots.append(CompressionReport.failed(str(path), f"{type(exc).__name__}: {exc}"))
            continue
        jobs.append((str(path), item, partition, table, pooled_counts))
        slots.append(None)

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_compare_job, jobs))
    else:
        done = [_compare_job(job) for job in jobs]

    results = iter(done)
    reports = [slot if slot is not None else next(results) for slot in slots]
    return BatchResult(reports=reports, model_source=model_source, pooled_table=pooled, partition=partition)


def write_csv(result: BatchResult, out: IO[str] | Path) -> None:
    """One row per file in input order, then the aggregate row when any file succeeded."""
    if isinstance(out, Path):
        with out.open("w", newline="", encoding="utf-8") as f:
            write_csv(result, f)
        return
    writer = csv.writer(out)
    writer.writerow(CSV_COLUMNS)
    for report in result.reports:
        writer.writerow(report.csv_row())
    aggregate = result.aggregate
    if aggregate is not None:
        writer.writerow(aggregate.csv_row())
