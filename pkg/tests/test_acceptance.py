"""Coder property checks and full-scale corpus checks (the 50-map 1280x720 runs need ``pytest -m slow``)."""

import numpy as np
import pytest

from sacoder.bench import ModelSource, batch
from sacoder.edgemap import (
    EdgeMap,
    detokenize,
    format_pbm,
    generate_corpus,
    parse_pbm,
    reshape_blocks,
    tokenize_blocks,
)
from sacoder.reconstruct import ExportKind, ExportPolicy
from sacoder.stream import decode_stream, encode_stream
from sacoder.synonymy import load_builtin_partition, to_set_sequence
from sacoder.verify import bound_sweep, entropy_trials, oracle_trials, singleton_trials

CORPUS_SIZE = 50
WIDTH, HEIGHT = 1280, 720


@pytest.fixture(scope="module")
def corpus_paths(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    paths = []
    for i, edge_map in enumerate(generate_corpus(CORPUS_SIZE, WIDTH, HEIGHT, seed=0)):
        path = out / f"edge_{i:03d}.pbm"
        path.write_bytes(format_pbm(edge_map, raw=True))
        paths.append(path)
    return paths


@pytest.fixture(scope="module")
def corpus_result(corpus_paths):
    return batch(corpus_paths, load_builtin_partition(), workers=4)


@pytest.fixture(scope="module")
def per_file_result(corpus_paths):
    return batch(corpus_paths, load_builtin_partition(), model_source=ModelSource.PER_FILE, workers=4)


class TestCoderProperties:
    """Exhaustive and randomized coder checks."""

    def test_bound_sweep(self):
        result = bound_sweep(max_m=8, alphabet=4)
        assert result.passed, result.counterexample

    def test_stream_matches_exact(self):
        result = oracle_trials(trials=500, seed=0, max_m=64)
        assert result.passed, result.counterexample

    def test_singleton_degeneration(self):
        result = singleton_trials(trials=100, seed=0)
        assert result.passed, result.counterexample

    def test_entropy_ordering(self):
        result = entropy_trials(trials=1000, seed=0)
        assert result.passed, result.counterexample


@pytest.mark.slow
class TestCorpus:
    """Corpus-level compression results."""

    def test_block_count(self, corpus_result):
        assert all(r.m == 230_400 for r in corpus_result.reports)

    def test_sac_approaches_semantic_entropy(self, corpus_result):
        for report in corpus_result.reports:
            assert report.overhead <= 5e-5, report.file

    def test_saving_matches_entropy_ratio(self, corpus_result):
        aggregate = corpus_result.aggregate
        assert aggregate.saving > 0
        assert aggregate.saving == pytest.approx(corpus_result.ideal_saving, abs=1e-3)
        assert aggregate.corpus_saving == pytest.approx(corpus_result.ideal_saving, abs=1e-3)

    def test_per_file_gap_not_below_quantization_slack(self, per_file_result):
        for report in per_file_result.reports:
            assert report.gap >= -report.eps_quant - 1 / report.m, report.file
            assert report.overhead <= 5e-5, report.file

    @pytest.mark.parametrize("kind", list(ExportKind))
    def test_semantic_losslessness(self, corpus_paths, edge_partition, corpus_result, kind):
        table = corpus_result.pooled_table
        policy = ExportPolicy(kind, seed=1)
        for path in corpus_paths:
            blocks = tokenize_blocks(parse_pbm(path.read_bytes())).tolist()
            decoded = decode_stream(encode_stream(blocks, edge_partition, table), policy=policy)
            assert to_set_sequence(decoded, edge_partition) == to_set_sequence(blocks, edge_partition)
            restored = detokenize(reshape_blocks(decoded, WIDTH))
            assert (restored.width, restored.height) == (WIDTH, HEIGHT)


class TestBijections:
    """Tokenization and PBM identities."""

    def test_tokenize_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            h, w = 2 * rng.integers(1, 17, size=2)
            edge_map = EdgeMap(rng.integers(0, 2, size=(h, w), dtype=np.uint8))
            assert detokenize(tokenize_blocks(edge_map)) == edge_map

    @pytest.mark.slow
    @pytest.mark.parametrize("raw", [False, True])
    def test_pbm_round_trip(self, corpus_paths, raw):
        edge_map = parse_pbm(corpus_paths[0].read_bytes())
        assert parse_pbm(format_pbm(edge_map, raw=raw)) == edge_map
