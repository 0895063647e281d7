"""Classical strategies: representation, exact scoring, and exhaustive search.

A deterministic strategy is a per-player output table; the whole table packs
into a 2n-bit code so exhaustive sweeps run over a plain integer range.  All
proportions and probabilities are exact `Fraction`s; the complex strategy
score is an exact Gaussian integer.  Floats never enter any bound check.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Answer, GameConfig, Question, legitimate_bits

DEFAULT_EXHAUSTIVE_LIMIT = 8
#: beyond this the full set of optimal strategies is not materialized
OPTIMAL_SET_LIMIT = 6


def exhaustive_limit() -> int:
    return int(os.environ.get("GAME_EXHAUSTIVE_LIMIT", DEFAULT_EXHAUSTIVE_LIMIT))


def classical_bound(n: int) -> Fraction:
    """Best success proportion any deterministic strategy can reach: 1/2 + 2^-ceil(n/2)."""
    return Fraction(1, 2) + Fraction(1, 1 << math.ceil(n / 2))


@dataclass(frozen=True)
class DeterministicStrategy:
    """Per-player output table: outputs[i-1] = (output on input 0, output on input 1)."""

    outputs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for pair in self.outputs:
            if len(pair) != 2 or any(b not in (0, 1) for b in pair):
                raise ValueError(f"bad output pair {pair!r}")

    @property
    def n(self) -> int:
        return len(self.outputs)

    @classmethod
    def from_code(cls, n: int, code: int) -> "DeterministicStrategy":
        """Unpack a 2n-bit code; player 1's pair sits in the most significant bits."""
        if not 0 <= code < 1 << (2 * n):
            raise ValueError(f"code {code} out of range for n={n}")
        outputs = []
        for i in range(1, n + 1):
            shift = 2 * (n - i)
            outputs.append(((code >> (shift + 1)) & 1, (code >> shift) & 1))
        return cls(tuple(outputs))

    @classmethod
    def from_strings(cls, pairs: list[str] | tuple[str, ...]) -> "DeterministicStrategy":
        """Build from two-character strings like "01" (output on 0, output on 1)."""
        return cls(tuple((int(p[0]), int(p[1])) for p in pairs))

    @property
    def code(self) -> int:
        c = 0
        for out0, out1 in self.outputs:
            c = (c << 2) | (out0 << 1) | out1
        return c

    def output(self, player: int, input_bit: int) -> int:
        return self.outputs[player - 1][input_bit]

    def sign(self, player: int, input_bit: int) -> int:
        """+1 when the player outputs 0, -1 when it outputs 1."""
        return 1 - 2 * self.outputs[player - 1][input_bit]


@dataclass(frozen=True)
class StrategyScore:
    """Exact complex score of a strategy plus its direct win/loss tally."""

    re: int
    im: int
    wins: int
    losses: int


def eval_answer(strat: DeterministicStrategy, q: Question) -> Answer:
    """The answer the strategy produces on a question (no communication, so per-player lookup)."""
    if strat.n != q.n:
        raise ValueError(f"size mismatch: strategy n={strat.n}, question n={q.n}")
    bits = 0
    for player in range(1, q.n + 1):
        bits = (bits << 1) | strat.output(player, q.bit(player))
    return Answer(q.n, bits)


def success_proportion(strat: DeterministicStrategy) -> Fraction:
    """Fraction of legitimate questions answered appropriately, exact."""
    n = strat.n
    return Fraction(_count_wins(strat), 1 << (n - 1))


def strategy_score(strat: DeterministicStrategy) -> StrategyScore:
    """Exact Gaussian-integer product over players of (sign(i,0) + i*sign(i,1)).

    The real part must equal wins minus losses over the legitimate questions;
    a mismatch means a scoring bug and raises.
    """
    re, im = 1, 0
    for player in range(1, strat.n + 1):
        c, d = strat.sign(player, 0), strat.sign(player, 1)
        re, im = re * c - im * d, re * d + im * c
    wins = _count_wins(strat)
    losses = (1 << (strat.n - 1)) - wins
    if re != wins - losses:
        raise RuntimeError(
            f"score identity violated: Re(s)={re} but wins-losses={wins - losses}"
        )
    if abs(re) > 1 << (strat.n // 2):
        raise RuntimeError(f"|Re(s)|={abs(re)} exceeds 2^floor(n/2)")
    return StrategyScore(re, im, wins, losses)


def exhaustive_best(cfg: GameConfig) -> tuple[Fraction, list[DeterministicStrategy]]:
    """Sweep all 4^n strategies; returns the best proportion and every maximizer.

    Witnesses come back in increasing order of their packed code.
    """
    n = cfg.n
    if n > exhaustive_limit():
        raise ValueError(f"n={n} exceeds the exhaustive-search limit {exhaustive_limit()}")
    wins = win_count_table(n)
    best = int(wins.max())
    witnesses = [DeterministicStrategy.from_code(n, int(c)) for c in np.nonzero(wins == best)[0]]
    return Fraction(best, 1 << (n - 1)), witnesses


#: optimal output pairs (player 1, players 2..n) keyed on n mod 8;
#: each row is verified against the exhaustive sweep in the test suite
SIMPLE_OPTIMAL_TABLE = {
    0: ("00", "00"),
    1: ("00", "00"),
    2: ("01", "00"),
    3: ("11", "11"),
    4: ("11", "00"),
    5: ("11", "11"),
    6: ("10", "00"),
    7: ("00", "00"),
}


def table1_strategy(cfg: GameConfig) -> DeterministicStrategy:
    """The simple optimal strategy for this n: one row of pairs keyed on n mod 8."""
    first, rest = SIMPLE_OPTIMAL_TABLE[cfg.n % 8]
    return DeterministicStrategy.from_strings([first] + [rest] * (cfg.n - 1))


def optimal_set(cfg: GameConfig) -> list[DeterministicStrategy]:
    """All strategies reaching the classical bound exactly, in code order."""
    n = cfg.n
    if n > OPTIMAL_SET_LIMIT:
        raise ValueError(f"optimal_set is materialized only for n <= {OPTIMAL_SET_LIMIT}")
    wins = win_count_table(n)
    best = (1 << (n - 2)) + (1 << (n // 2 - 1))  # wins at proportion 1/2 + 2^-ceil(n/2)
    return [DeterministicStrategy.from_code(n, int(c)) for c in np.nonzero(wins == best)[0]]


def is_balanced(strategies: list[DeterministicStrategy], cfg: GameConfig) -> bool:
    """Whether every legitimate question is won by the same number of member strategies."""
    counts = per_question_win_counts(strategies, cfg)
    return len(set(counts)) <= 1


def per_question_win_counts(
    strategies: list[DeterministicStrategy], cfg: GameConfig
) -> list[int]:
    """For each legitimate question (in order), how many member strategies win it."""
    counts = []
    for x in legitimate_bits(cfg.n):
        target = (x.bit_count() >> 1) & 1
        counts.append(sum(1 for s in strategies if _answer_parity(s, x) == target))
    return counts


@dataclass(frozen=True)
class ProbabilisticStrategy:
    """A finite mixture of deterministic strategies with exact rational weights."""

    strategies: tuple[DeterministicStrategy, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.strategies) != len(self.weights):
            raise ValueError("one weight per strategy required")
        if not self.strategies:
            raise ValueError("the mixture needs at least one strategy")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if sum(self.weights, Fraction(0)) != 1:
            raise ValueError("weights must sum to exactly 1")
        if len({s.n for s in self.strategies}) != 1:
            raise ValueError("all member strategies must have the same player count")

    @classmethod
    def uniform(cls, strategies: list[DeterministicStrategy]) -> "ProbabilisticStrategy":
        w = Fraction(1, len(strategies))
        return cls(tuple(strategies), (w,) * len(strategies))

    @property
    def n(self) -> int:
        return self.strategies[0].n

    def win_probabilities(self) -> list[Fraction]:
        """Per legitimate question (in order), the probability of answering appropriately."""
        probs = []
        for x in legitimate_bits(self.n):
            target = (x.bit_count() >> 1) & 1
            p = sum(
                (w for s, w in zip(self.strategies, self.weights) if _answer_parity(s, x) == target),
                Fraction(0),
            )
            probs.append(p)
        return probs

    def success_probability(self) -> Fraction:
        """Worst case over legitimate questions (the min, not the mean)."""
        return min(self.win_probabilities())

    def success_proportion(self) -> Fraction:
        """Average over legitimate questions of the per-question win probability."""
        probs = self.win_probabilities()
        return sum(probs, Fraction(0)) / len(probs)


def pair_flip_map(strat: DeterministicStrategy) -> DeterministicStrategy:
    """The score-preserving bijection acting on players 1 and 2.

    It rotates the first player's table a quarter turn one way and the second
    player's the other way, which leaves the Gaussian-integer score unchanged
    and trades appropriateness on 00... questions for 11... questions.
    """
    if strat.n < 2:
        raise ValueError("the mapping needs at least two players")
    out = list(strat.outputs)
    a0, a1 = out[0]
    b0, b1 = out[1]
    out[0] = (a1, 1 - a0)
    out[1] = (1 - b1, b0)
    return DeterministicStrategy(tuple(out))


def win_count_table(n: int) -> np.ndarray:
    """wins[code] over all 4^n packed strategy codes, via vectorized parity counting."""
    codes = np.arange(1 << (2 * n), dtype=np.uint64)
    wins = np.zeros(codes.size, dtype=np.int64)
    for x in legitimate_bits(n):
        target = (x.bit_count() >> 1) & 1
        mask = _selector_mask(n, x)
        parity = np.bitwise_count(codes & np.uint64(mask)) & 1
        wins += parity == target
    return wins


def _selector_mask(n: int, question_bits: int) -> int:
    """Mask picking, for each player, the code bit its input selects.

    The parity of code & mask is the parity of the strategy's answer.
    """
    mask = 0
    for i in range(1, n + 1):
        j = (question_bits >> (n - i)) & 1
        mask |= 1 << (2 * (n - i) + (1 - j))
    return mask


def _answer_parity(strat: DeterministicStrategy, question_bits: int) -> int:
    """Parity of the strategy's answer on a packed question."""
    n = strat.n
    parity = 0
    for i in range(1, n + 1):
        parity ^= strat.outputs[i - 1][(question_bits >> (n - i)) & 1]
    return parity


def _count_wins(strat: DeterministicStrategy) -> int:
    n = strat.n
    wins = 0
    for x in legitimate_bits(n):
        target = (x.bit_count() >> 1) & 1
        if _answer_parity(strat, x) == target:
            wins += 1
    return wins
