"""
Self-checks behind ``sac verify``.

Each check returns a VerificationResult carrying the number of cases it
ran and the first counterexample, if any.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from sacoder.container import CodingMode
from sacoder.exact import ExactInterval, decode_exact, encode_exact, exact_interval, shortest_fraction, update_interval
from sacoder.model import ProbabilityTable, table_from_counts
from sacoder.stream import MAX_FLUSH_BITS, decode_indexes, decode_stream, encode_stream
from sacoder.synonymy import (
    SynonymousPartition,
    semantic_entropy,
    set_masses,
    shannon_entropy,
    singleton_partition,
    to_set_sequence,
)

ENTROPY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class VerificationResult:
    name: str
    cases: int
    counterexample: str | None = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None


def verification_model(alphabet: int) -> tuple[ProbabilityTable, SynonymousPartition]:
    """
    Table and partition for the exhaustive sweep.

    Four symbols use counts [7, 3, 3, 3] with sets [[0], [1, 2], [3]];
    other sizes use counts n % 3 + 1 with {0} followed by consecutive pairs.
    """
    if alphabet < 1:
        raise ValueError("Alphabet must hold at least one symbol")
    if alphabet == 4:
        return table_from_counts([7, 3, 3, 3]), SynonymousPartition(sets=((0,), (1, 2), (3,)))
    counts = [n % 3 + 1 for n in range(alphabet)]
    sets = [(0,)] + [tuple(range(n, min(n + 2, alphabet))) for n in range(1, alphabet, 2)]
    return table_from_counts(counts), SynonymousPartition(sets=tuple(sets))


def bound_sweep(max_m: int = 8, alphabet: int = 4) -> VerificationResult:
    """
    Exhaustively check the exact codeword length against -log2 q + 2.

    Every symbol sequence of length 1..max_m is visited depth-first, so each
    prefix interval is computed once.
    """
    table, partition = verification_model(alphabet)
    masses = set_masses(partition, table)
    cum = [Fraction(0)]
    for mass in masses:
        cum.append(cum[-1] + Fraction(mass, table.total))
    set_of = [partition.set_of[n] for n in range(alphabet)]

    cases = 0
    stack: list[tuple[ExactInterval, tuple[int, ...]]] = [(ExactInterval(), ())]
    while stack:
        iv, prefix = stack.pop()
        if len(prefix) == max_m:
            continue
        for symbol in range(alphabet):
            k = set_of[symbol]
            if masses[k] == 0:
                continue
            child = update_interval(iv, cum[k], cum[k + 1] - cum[k])
            seq = (*prefix, symbol)
            cases += 1
            length = len(shortest_fraction(child.low, child.high))
            if child.length * Fraction(2) ** (length - 2) > 1:
                bound = -math.log2(child.length) + 2
                return VerificationResult(
                    "length-bound", cases, f"u={list(seq)}: codeword {length} bits > bound {bound:.4f}"
                )
            stack.append((child, seq))
    return VerificationResult("length-bound", cases)


def _random_instance(
    rng: np.random.Generator, max_m: int, singleton: bool = False
) -> tuple[ProbabilityTable, SynonymousPartition, list[int]]:
    size = int(rng.integers(1, 9))
    counts = rng.integers(0, 21, size)
    if not counts.any():
        counts[int(rng.integers(size))] = 1
    table = table_from_counts(counts.tolist())

    if singleton:
        partition = singleton_partition(size)
    else:
        order = rng.permutation(size)
        cuts = sorted(rng.choice(np.arange(1, size), size=int(rng.integers(0, size)), replace=False).tolist())
        groups = np.split(order, cuts)
        partition = SynonymousPartition(sets=tuple(tuple(sorted(int(n) for n in g)) for g in groups))

    m = int(rng.integers(0, max_m + 1))
    probs = counts / counts.sum()
    u = rng.choice(size, size=m, p=probs).tolist()
    return table, partition, u


def _describe(table: ProbabilityTable, partition: SynonymousPartition, u: list[int]) -> str:
    return f"counts={list(table.counts)} sets={[list(s) for s in partition.sets]} u={u}"


def oracle_trials(trials: int = 500, seed: int = 0, max_m: int = 64) -> VerificationResult:
    """Stream and exact coders must decode identical set sequences, with stream length <= exact + flush."""
    rng = np.random.default_rng(seed)
    for case in range(1, trials + 1):
        table, partition, u = _random_instance(rng, max_m)
        expected = to_set_sequence(u, partition)

        container = encode_stream(u, partition, table, CodingMode.SEMANTIC)
        stream_sets = decode_indexes(container)
        bits = encode_exact(u, partition, table)
        exact_sets = to_set_sequence(decode_exact(bits, len(u), partition, table), partition)

        problem = None
        if stream_sets != expected:
            problem = "stream decode lost the set sequence"
        elif exact_sets != expected:
            problem = "exact decode lost the set sequence"
        elif container.payload_bit_count > len(bits) + MAX_FLUSH_BITS:
            problem = f"stream payload {container.payload_bit_count} bits > exact {len(bits)} + {MAX_FLUSH_BITS}"
        else:
            iv, _ = exact_interval(u, partition, table)
            ideal = math.ceil(-math.log2(iv.length)) if iv.length < 1 else 0
            if container.payload_bit_count > ideal + MAX_FLUSH_BITS:
                problem = f"stream payload {container.payload_bit_count} bits > ceil(-log2 q) {ideal} + flush"
        if problem:
            return VerificationResult("stream-exact-oracle", case, f"{problem}: {_describe(table, partition, u)}")
    return VerificationResult("stream-exact-oracle", trials)


def singleton_trials(trials: int = 100, seed: int = 0, max_m: int = 64) -> VerificationResult:
    """With singleton sets both modes must emit identical payloads and decode the input exactly."""
    rng = np.random.default_rng(seed)
    for case in range(1, trials + 1):
        table, partition, u = _random_instance(rng, max_m, singleton=True)
        semantic = encode_stream(u, partition, table, CodingMode.SEMANTIC)
        syntactic = encode_stream(u, partition, table, CodingMode.SYNTACTIC)

        problem = None
        if semantic.payload != syntactic.payload:
            problem = "payloads differ"
        elif decode_stream(syntactic) != u:
            problem = "syntactic decode differs from the input"
        elif decode_stream(semantic) != u:
            problem = "semantic decode differs from the input"
        if problem:
            return VerificationResult("singleton-degeneration", case, f"{problem}: {_describe(table, partition, u)}")
    return VerificationResult("singleton-degeneration", trials)


def entropy_trials(trials: int = 1000, seed: int = 0) -> VerificationResult:
    """Semantic entropy never exceeds Shannon entropy."""
    rng = np.random.default_rng(seed)
    for case in range(1, trials + 1):
        table, partition, _ = _random_instance(rng, 0)
        hs, h = semantic_entropy(partition, table), shannon_entropy(table)
        if hs > h + ENTROPY_TOLERANCE:
            return VerificationResult(
                "entropy-ordering", case, f"H_s {hs} > H {h}: {_describe(table, partition, [])}"
            )
    return VerificationResult("entropy-ordering", trials)


def run_all(max_m: int = 8, alphabet: int = 4, trials: int = 500, seed: int = 0) -> list[VerificationResult]:
    return [
        bound_sweep(max_m, alphabet),
        oracle_trials(trials, seed),
        singleton_trials(max(trials // 5, 1) if trials else 0, seed),
        entropy_trials(trials * 2, seed),
    ]
