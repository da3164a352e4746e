"""Tests for the verify self-checks."""

import pytest

from sacoder.model import Alphabet
from sacoder.synonymy import validate_partition
from sacoder.verify import bound_sweep, entropy_trials, oracle_trials, run_all, verification_model


class TestVerificationModel:
    """Test the sweep model."""

    def test_four_symbols(self):
        table, partition = verification_model(4)
        assert table.counts == (7, 3, 3, 3)
        assert partition.sets == ((0,), (1, 2), (3,))

    @pytest.mark.parametrize("size", [1, 2, 3, 5, 6])
    def test_other_sizes_are_valid(self, size):
        table, partition = verification_model(size)
        assert table.size == size
        assert validate_partition(partition, Alphabet(size)) == []

    def test_rejects_empty_alphabet(self):
        with pytest.raises(ValueError):
            verification_model(0)


class TestChecks:
    """Test the individual checks."""

    def test_sweep_zero_length(self):
        result = bound_sweep(max_m=0)
        assert result.passed
        assert result.cases == 0

    def test_sweep_other_alphabet(self):
        result = bound_sweep(max_m=3, alphabet=5)
        assert result.passed
        assert result.cases == 5 + 25 + 125

    def test_oracle(self):
        result = oracle_trials(trials=40, seed=1, max_m=48)
        assert result.passed
        assert result.cases == 40

    def test_entropy(self):
        assert entropy_trials(trials=200, seed=2).passed

    def test_run_all_small(self):
        results = run_all(max_m=3, trials=20, seed=5)
        assert [r.name for r in results] == [
            "length-bound",
            "stream-exact-oracle",
            "singleton-degeneration",
            "entropy-ordering",
        ]
        assert all(r.passed for r in results)

    def test_run_all_without_trials(self):
        results = run_all(max_m=2, trials=0)
        assert all(r.passed for r in results)
        assert [r.cases for r in results[1:]] == [0, 0, 0]

    def test_defaults(self):
        assert all(r.passed for r in run_all())
