"""Tests for synonymous partitions and entropy functionals."""

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sacoder.errors import EmptyPartitionError, OutOfRangeError, PartitionSyntaxError, SacError, ValidationError
from sacoder.model import Alphabet, table_from_counts
from sacoder.synonymy import (
    SynonymousPartition,
    format_partition_file,
    load_builtin_partition,
    parse_partition_file,
    semantic_entropy,
    set_index_of,
    set_probability,
    shannon_entropy,
    singleton_partition,
    to_set_sequence,
    validate_partition,
    whole_partition,
)
from sacoder.validator import Issue, IssueKind


@st.composite
def tables_and_partitions(draw):
    """A random count table and a random partition of its alphabet."""
    size = draw(st.integers(min_value=1, max_value=10))
    counts = draw(st.lists(st.integers(min_value=0, max_value=50), min_size=size, max_size=size).filter(any))
    labels = draw(st.lists(st.integers(min_value=0, max_value=size - 1), min_size=size, max_size=size))
    groups: dict[int, list[int]] = {}
    for symbol, label in enumerate(labels):
        groups.setdefault(label, []).append(symbol)
    return table_from_counts(counts), SynonymousPartition.from_lists(groups.values())


class TestValidatePartition:
    """Test structured partition validation."""

    def test_singletons_valid(self):
        assert validate_partition(singleton_partition(4), Alphabet(4)) == []

    def test_overlap(self):
        issues = validate_partition(SynonymousPartition.from_lists([[0, 1], [1, 2], [3]]), Alphabet(4))
        assert issues == [Issue(IssueKind.OVERLAP, symbol=1, set_index=1)]

    def test_missing(self):
        issues = validate_partition(SynonymousPartition.from_lists([[0, 1], [3]]), Alphabet(4))
        assert issues == [Issue(IssueKind.MISSING, symbol=2)]

    def test_empty_set(self):
        issues = validate_partition(SynonymousPartition.from_lists([[0, 1], []]), Alphabet(2))
        assert [i.kind for i in issues] == [IssueKind.EMPTY_SET]

    def test_unknown_and_unsorted(self):
        issues = validate_partition(SynonymousPartition.from_lists([[1, 0], [2, 5]]), Alphabet(3))
        kinds = [i.kind for i in issues]
        assert IssueKind.UNSORTED in kinds
        assert Issue(IssueKind.UNKNOWN_SYMBOL, symbol=5, set_index=1) in issues

    def test_every_problem_reported(self):
        """Validation collects all issues instead of stopping at the first."""
        issues = validate_partition(SynonymousPartition.from_lists([[0, 0], []]), Alphabet(3))
        assert {i.kind for i in issues} == {IssueKind.OVERLAP, IssueKind.EMPTY_SET, IssueKind.MISSING}


class TestLookups:
    """Test set membership and probabilities."""

    @pytest.mark.parametrize("symbol,expected", [(0, 0), (1, 1), (2, 1), (3, 2)])
    def test_set_index_of(self, three_sets, symbol, expected):
        assert set_index_of(three_sets, symbol) == expected

    def test_set_index_of_singletons(self):
        partition = singleton_partition(6)
        assert [set_index_of(partition, n) for n in range(6)] == list(range(6))

    def test_set_index_out_of_range(self, three_sets):
        with pytest.raises(OutOfRangeError):
            set_index_of(three_sets, 4)

    def test_set_probability(self, three_sets, table_4222):
        assert set_probability(three_sets, table_4222, 1) == Fraction(4, 10)
        assert set_probability(whole_partition(4), table_4222, 0) == 1
        assert set_probability(singleton_partition(4), table_4222, 2) == Fraction(2, 10)

    def test_set_probabilities_sum_to_one(self, edge_partition):
        table = table_from_counts(range(1, 17))
        assert sum(set_probability(edge_partition, table, k) for k in range(edge_partition.num_sets)) == 1

    @pytest.mark.parametrize(
        "u,expected",
        [([0, 2, 3], [0, 1, 2]), ([], []), ([1, 1, 1], [1, 1, 1])],
    )
    def test_to_set_sequence(self, three_sets, u, expected):
        assert to_set_sequence(u, three_sets) == expected

    def test_to_set_sequence_reports_position(self, three_sets):
        with pytest.raises(OutOfRangeError) as exc_info:
            to_set_sequence([0, 1, 9], three_sets)
        assert exc_info.value.position == 2

    @given(tables_and_partitions(), st.data())
    def test_member_substitution_keeps_sets(self, table_and_partition, data):
        """Replacing every symbol by any member of its set leaves the set sequence unchanged."""
        _, partition = table_and_partition
        sets = data.draw(st.lists(st.integers(0, partition.num_sets - 1), max_size=20))
        u = [data.draw(st.sampled_from(partition.sets[k])) for k in sets]
        assert to_set_sequence(u, partition) == sets


class TestEntropy:
    """Test Shannon and semantic entropy."""

    def test_examples(self, three_sets, table_4222):
        assert shannon_entropy(table_4222) == pytest.approx(1.921928, abs=1e-6)
        assert semantic_entropy(three_sets, table_4222) == pytest.approx(1.521928, abs=1e-6)

    def test_trivial_tables(self):
        assert shannon_entropy(table_from_counts([1, 1])) == 1.0
        assert shannon_entropy(table_from_counts([1])) == 0.0

    def test_whole_set_has_zero_entropy(self, table_4222):
        assert semantic_entropy(whole_partition(4), table_4222) == 0.0

    def test_singleton_equals_shannon(self, table_7333):
        assert semantic_entropy(singleton_partition(4), table_7333) == shannon_entropy(table_7333)

    @given(tables_and_partitions())
    def test_semantic_never_exceeds_shannon(self, table_and_partition):
        table, partition = table_and_partition
        hs, h = semantic_entropy(partition, table), shannon_entropy(table)
        assert hs <= h + 1e-12

        # equality exactly when no set holds two positive-probability symbols
        merges = any(sum(1 for n in members if table.counts[n] > 0) > 1 for members in partition.sets)
        if merges:
            assert hs < h - 1e-12
        else:
            assert math.isclose(hs, h, abs_tol=1e-12)


class TestPartitionFile:
    """Test partition file parsing and formatting."""

    def test_parse(self):
        partition = parse_partition_file("set a: 0\nset b: 1 2\nset c: 3")
        assert partition.sets == ((0,), (1, 2), (3,))
        assert partition.names == ("a", "b", "c")

    def test_comments_and_blank_lines(self):
        partition = parse_partition_file(b"# header\n\nset x: 0 1\n  # indented comment\nset y: 2\n")
        assert partition.sets == ((0, 1), (2,))

    def test_duplicate_member_is_overlap(self):
        with pytest.raises(ValidationError) as exc_info:
            parse_partition_file("set a: 0 0")
        assert Issue(IssueKind.OVERLAP, symbol=0, set_index=0) in exc_info.value.issues

    def test_empty_file(self):
        with pytest.raises(EmptyPartitionError):
            parse_partition_file("")

    @pytest.mark.parametrize("text,line", [("set a 0 1", 1), ("set a: 0\nset b: x", 2), ("group a: 1", 1)])
    def test_syntax_error(self, text, line):
        with pytest.raises(PartitionSyntaxError) as exc_info:
            parse_partition_file(text)
        assert exc_info.value.line == line

    def test_explicit_alphabet_reports_missing(self):
        with pytest.raises(ValidationError) as exc_info:
            parse_partition_file("set a: 0 1", Alphabet(3))
        assert exc_info.value.issues == [Issue(IssueKind.MISSING, symbol=2)]

    def test_not_utf8(self):
        with pytest.raises(SacError):
            parse_partition_file(b"set a: \xff")

    def test_format_round_trip(self, edge_partition):
        assert parse_partition_file(format_partition_file(edge_partition)) == edge_partition


class TestBuiltinPartition:
    """Test the shipped edge-block partition."""

    def test_eleven_sets_over_sixteen_blocks(self, edge_partition):
        assert edge_partition.num_sets == 11
        assert validate_partition(edge_partition, Alphabet(16)) == []

    def test_groups(self, edge_partition):
        assert set_index_of(edge_partition, 3) == set_index_of(edge_partition, 12)
        assert set_index_of(edge_partition, 5) == set_index_of(edge_partition, 10)
        assert set_index_of(edge_partition, 9) != set_index_of(edge_partition, 6)
        assert edge_partition.sets[0] == (0,)

    def test_unknown_builtin(self):
        with pytest.raises(SacError):
            load_builtin_partition("nope")
