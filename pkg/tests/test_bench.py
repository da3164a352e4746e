"""Tests for the AC vs SAC comparison and corpus reports."""

import csv
import io

import pytest

from sacoder.bench import (
    AGGREGATE_LABEL,
    CSV_COLUMNS,
    BatchResult,
    CompressionReport,
    ModelSource,
    batch,
    compare,
    write_csv,
)
from sacoder.edgemap import block_counts, estimate_model, format_pbm, generate_corpus, parse_pbm, tokenize_blocks
from sacoder.errors import SacError
from sacoder.stream import MAX_FLUSH_BITS
from sacoder.synonymy import entropy_bits, semantic_entropy, singleton_partition, whole_partition


@pytest.fixture
def blocks(small_corpus):
    return tokenize_blocks(small_corpus[0])


class TestCompare:
    """Test single-sequence reports."""

    def test_edge_partition_saves(self, blocks, edge_partition):
        report = compare(blocks, edge_partition, estimate_model(blocks), file="a.pbm")
        assert report.file == "a.pbm"
        assert report.m == len(blocks)
        assert report.l_sac < report.l_ac
        assert 0 < report.saving < 1
        assert report.hs_sebits < report.h_bits
        assert report.saved_sebits == report.l_ac - report.l_sac
        assert report.header_bytes > 0

    def test_singletons_save_nothing(self, blocks):
        report = compare(blocks, singleton_partition(16), estimate_model(blocks))
        assert report.l_sac == report.l_ac
        assert report.saving == 0
        assert report.hs_sebits == report.h_bits

    def test_whole_set(self, blocks):
        report = compare(blocks, whole_partition(16), estimate_model(blocks))
        assert report.hs_sebits == 0
        assert report.l_sac <= MAX_FLUSH_BITS

    def test_overhead_within_flush(self, blocks, edge_partition):
        report = compare(blocks, edge_partition, estimate_model(blocks))
        assert report.overhead <= MAX_FLUSH_BITS / report.m
        assert report.avg_sac == pytest.approx(report.ideal_sac / report.m, abs=MAX_FLUSH_BITS / report.m)

    def test_own_model_has_no_quantization_slack_to_speak_of(self, blocks, edge_partition):
        report = compare(blocks, edge_partition, estimate_model(blocks))
        assert abs(report.eps_quant) < 1e-3
        assert report.gap > -1e-3

    def test_eps_quant_uses_source_counts(self, blocks, edge_partition):
        table = estimate_model(blocks)
        doubled = [2 * c for c in block_counts([blocks]).tolist()]
        assert compare(blocks, edge_partition, table, raw_counts=doubled).eps_quant == pytest.approx(
            compare(blocks, edge_partition, table).eps_quant
        )
        skewed = compare(blocks, edge_partition, table, raw_counts=[1] * 16)
        assert skewed.eps_quant == pytest.approx(skewed.hs_sebits - entropy_bits(map(len, edge_partition.sets)))

    def test_plain_symbol_list(self, three_sets, table_4222):
        report = compare([0, 1, 2, 3] * 50, three_sets, table_4222)
        assert report.m == 200
        assert report.breaks_shannon

    def test_empty_sequence(self, three_sets, table_4222):
        report = compare([], three_sets, table_4222)
        assert (report.m, report.l_ac, report.l_sac) == (0, 0, 0)
        assert report.saving == 0
        assert report.avg_sac == 0
        assert not report.breaks_shannon


class TestReport:
    """Test derived report fields."""

    def test_averages(self):
        report = CompressionReport("f", 100, 300, 200, 40, 3.2, 2.1, 0.0, 195.0)
        assert report.avg_ac == 3.0
        assert report.avg_sac == 2.0
        assert report.saving == pytest.approx(1 / 3)
        assert report.gap == pytest.approx(-0.1)
        assert report.overhead == pytest.approx(0.05)
        assert report.breaks_shannon

    def test_failed_row(self):
        report = CompressionReport.failed("bad.pbm", "MalformedPbmError: nope")
        assert not report.ok
        row = report.csv_row()
        assert len(row) == len(CSV_COLUMNS)
        assert row[0] == "bad.pbm"
        assert row[-1] == "MalformedPbmError: nope"


class TestBatch:
    """Test corpus runs."""

    def test_pooled(self, corpus_dir, edge_partition):
        result = batch(corpus_dir, edge_partition)
        assert [r.file for r in result.reports] == [str(p) for p in corpus_dir]
        assert all(r.ok for r in result.reports)
        assert result.model_source is ModelSource.POOLED
        assert result.pooled_table is not None
        assert 0 < result.ideal_saving < 1

    def test_per_file(self, corpus_dir, edge_partition):
        result = batch(corpus_dir, edge_partition, model_source=ModelSource.PER_FILE)
        assert result.pooled_table is None
        assert result.ideal_saving is None
        assert all(r.eps_quant == pytest.approx(0, abs=1e-3) for r in result.reports)

    def test_pooled_eps_quant_is_shared(self, corpus_dir, edge_partition):
        result = batch(corpus_dir, edge_partition)
        sequences = [tokenize_blocks(parse_pbm(p.read_bytes())) for p in corpus_dir]
        raw_sets = [sum(int(block_counts(sequences)[n]) for n in members) for members in edge_partition.sets]
        expected = semantic_entropy(edge_partition, result.pooled_table) - entropy_bits(raw_sets)
        for report in result.reports:
            assert report.eps_quant == pytest.approx(expected)
        assert abs(expected) < 1e-3

    def test_per_file_gap_not_below_quantization_slack(self, corpus_dir, edge_partition):
        result = batch(corpus_dir, edge_partition, model_source=ModelSource.PER_FILE)
        for report in result.reports:
            # a stream codeword is at most one bit shorter than the ideal length
            assert report.gap >= -report.eps_quant - 1 / report.m

    def test_aggregate_is_unweighted_mean(self, corpus_dir, edge_partition):
        result = batch(corpus_dir, edge_partition)
        aggregate = result.aggregate
        assert aggregate.files == len(corpus_dir)
        assert aggregate.saving == pytest.approx(sum(r.saving for r in result.reports) / len(corpus_dir))
        assert aggregate.m == pytest.approx(sum(r.m for r in result.reports) / len(corpus_dir))
        total_ac = sum(r.l_ac for r in result.reports)
        assert aggregate.corpus_saving == pytest.approx(1 - sum(r.l_sac for r in result.reports) / total_ac)

    def test_bad_file_becomes_error_row(self, corpus_dir, edge_partition, tmp_path):
        bad = tmp_path / "gray.pbm"
        bad.write_bytes(b"P5\n2 2\n255\n\x00\x00\x00\x00")
        result = batch([corpus_dir[0], bad, corpus_dir[1]], edge_partition)
        assert [r.ok for r in result.reports] == [True, False, True]
        assert "MalformedPbmError" in result.reports[1].error
        assert result.aggregate.files == 2

    def test_missing_file_becomes_error_row(self, corpus_dir, edge_partition, tmp_path):
        result = batch([tmp_path / "missing.pbm", corpus_dir[0]], edge_partition)
        assert not result.reports[0].ok
        assert result.reports[1].ok

    def test_all_failed(self, edge_partition, tmp_path):
        bad = tmp_path / "odd.pbm"
        bad.write_bytes(b"P1\n1 1\n0")
        result = batch([bad], edge_partition)
        assert result.aggregate is None
        assert result.pooled_table is None

    def test_no_inputs(self, edge_partition):
        with pytest.raises(SacError):
            batch([], edge_partition)

    def test_workers_keep_order(self, corpus_dir, edge_partition):
        serial = batch(corpus_dir, edge_partition)
        parallel = batch(corpus_dir, edge_partition, workers=2)
        assert parallel.reports == serial.reports

    def test_saving_tracks_ideal(self, tmp_path, edge_partition):
        paths = []
        for i, edge_map in enumerate(generate_corpus(8, 320, 240, seed=21)):
            path = tmp_path / f"m{i}.pbm"
            path.write_bytes(format_pbm(edge_map, raw=True))
            paths.append(path)
        result = batch(paths, edge_partition)
        assert result.aggregate.corpus_saving == pytest.approx(result.ideal_saving, abs=1e-3)
        for report in result.reports:
            assert report.overhead <= MAX_FLUSH_BITS / report.m


class TestCsv:
    """Test the CSV report."""

    def test_shape(self, corpus_dir, edge_partition):
        result = batch(corpus_dir, edge_partition)
        buffer = io.StringIO()
        write_csv(result, buffer)
        rows = list(csv.reader(io.StringIO(buffer.getvalue())))
        assert rows[0] == list(CSV_COLUMNS)
        assert len(rows) == len(corpus_dir) + 2
        assert rows[-1][0] == AGGREGATE_LABEL
        assert all(len(row) == len(CSV_COLUMNS) for row in rows)
        assert int(rows[1][1]) == result.reports[0].m

    def test_write_to_path(self, corpus_dir, edge_partition, tmp_path):
        out = tmp_path / "report.csv"
        write_csv(batch(corpus_dir[:2], edge_partition), out)
        assert out.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)

    def test_no_aggregate_without_successes(self):
        result = BatchResult(reports=[CompressionReport.failed("x", "boom")], model_source=ModelSource.POOLED)
        buffer = io.StringIO()
        write_csv(result, buffer)
        assert len(buffer.getvalue().splitlines()) == 2
