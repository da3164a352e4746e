"""Shared test fixtures for sacoder tests."""

import numpy as np
import pytest

from sacoder.edgemap import EdgeMap, format_pbm, generate_corpus
from sacoder.model import ProbabilityTable, table_from_counts
from sacoder.synonymy import SynonymousPartition, load_builtin_partition


@pytest.fixture
def table_4222() -> ProbabilityTable:
    """Counts [4, 2, 2, 2] over total 10."""
    return table_from_counts([4, 2, 2, 2])


@pytest.fixture
def table_7333() -> ProbabilityTable:
    """Counts [7, 3, 3, 3] over total 16."""
    return table_from_counts([7, 3, 3, 3])


@pytest.fixture
def three_sets() -> SynonymousPartition:
    """Sets [[0], [1, 2], [3]] over a 4-symbol alphabet."""
    return SynonymousPartition.from_lists([[0], [1, 2], [3]])


@pytest.fixture
def edge_partition() -> SynonymousPartition:
    """The shipped 11-set partition of 2x2 blocks."""
    return load_builtin_partition("edge2x2-11")


@pytest.fixture
def checker_map() -> EdgeMap:
    """8x4 map mixing horizontal, vertical and diagonal blocks."""
    bits = np.array(
        [
            [1, 1, 1, 0, 1, 0, 0, 0],
            [0, 0, 1, 0, 0, 1, 0, 0],
            [0, 1, 0, 0, 1, 1, 1, 1],
            [1, 0, 0, 0, 1, 1, 0, 0],
        ],
        dtype=np.uint8,
    )
    return EdgeMap(bits)


@pytest.fixture
def small_corpus():
    """Six 96x64 synthetic maps."""
    return generate_corpus(6, 96, 64, seed=7)


@pytest.fixture
def corpus_dir(tmp_path, small_corpus):
    """The small corpus written as P1 files; returns the sorted file paths."""
    out = tmp_path / "corpus"
    out.mkdir()
    paths = []
    for i, edge_map in enumerate(small_corpus):
        path = out / f"edge_{i:03d}.pbm"
        path.write_bytes(format_pbm(edge_map, raw=bool(i % 2)))
        paths.append(path)
    return paths
