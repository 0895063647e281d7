"""Imperfect apparatus: bit-flip noise and detection inefficiency.

Two failure modes are modelled on the classical outputs of the perfect
quantum strategy: each player's bit is flipped with probability 1-p, or each
player fails to produce a bit at all with probability 1-eta.  Closed-form
win probabilities and the thresholds where the noisy quantum strategy still
beats every classical strategy are computed here, together with the
brute-force sweep over no-output ("bot") strategy tables that pins down how
little an error-free classical strategy can achieve.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .classical import classical_bound
from .core import Answer, GameConfig, Question, legitimate_bits

DEFAULT_EXTENDED_LIMIT = 5


def extended_limit() -> int:
    return int(os.environ.get("GAME_EXTENDED_LIMIT", DEFAULT_EXTENDED_LIMIT))


@dataclass(frozen=True)
class BitFlipModel:
    """Each player outputs the predicted bit with probability p, its complement otherwise."""

    p: float

    def __post_init__(self) -> None:
        if not 0.5 <= self.p <= 1.0:
            raise ValueError(f"reliability p must lie in [0.5, 1], got {self.p}")


@dataclass(frozen=True)
class DetectionModel:
    """Each player produces an output with probability eta, nothing otherwise."""

    eta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"efficiency eta must lie in [0, 1], got {self.eta}")


@dataclass(frozen=True)
class MonteCarloEstimate:
    wins: int
    trials: int

    @property
    def estimate(self) -> float:
        return self.wins / self.trials

    @property
    def std_error(self) -> float:
        e = self.estimate
        return math.sqrt(e * (1.0 - e) / self.trials)


def bitflip_win_prob(n: int, model: BitFlipModel) -> float:
    """Win probability of the quantum strategy under independent bit flips.

    The round is won exactly when an even number of players flip, which
    collapses to 1/2 + (2p-1)^n / 2.
    """
    return 0.5 + (2.0 * model.p - 1.0) ** n / 2.0


def bitflip_threshold(n: int) -> float:
    """Reliability above which the noisy quantum strategy beats the classical bound.

    Exact solution of (2p-1)^n / 2 = 2^-ceil(n/2); for odd n this is the
    closed form 1/2 + sqrt(2)^(1+1/n)/4, and the even case solves the same
    equation with its own ceiling.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got n={n}")
    return 0.5 + 2.0 ** ((1 - math.ceil(n / 2)) / n - 1)


def detection_win_prob(n: int, model: DetectionModel) -> float:
    """Probability that every player produces an output (all-or-nothing round): eta^n."""
    return model.eta**n


def detection_threshold(n: int) -> float:
    """Efficiency above which eta^n beats the best error-free classical rate 2/2^(n-1)."""
    if n < 3:
        raise ValueError(f"need n >= 3, got n={n}")
    return 4.0 ** (1.0 / n) / 2.0


def bitflip_monte_carlo(
    n: int, model: BitFlipModel, trials: int, rng: np.random.Generator
) -> MonteCarloEstimate:
    """Sample noisy rounds: uniform legitimate question, perfect round, then flips.

    The perfect round uses the parity-tracking strategy (n-1 fair bits plus a
    parity fix); flips then land on the classical outputs.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    # uniform legitimate question: n-1 free bits, last bit fixes even weight
    qfree = rng.integers(0, 2, size=(trials, n - 1), dtype=np.int64)
    qlast = qfree.sum(axis=1) & 1
    weight = qfree.sum(axis=1) + qlast
    target = (weight >> 1) & 1
    # perfect quantum answer: uniform within the demanded parity class
    afree = rng.integers(0, 2, size=(trials, n - 1), dtype=np.int64)
    alast = (afree.sum(axis=1) + target) & 1
    flips = rng.random((trials, n)) < (1.0 - model.p)
    noisy_parity = (afree.sum(axis=1) + alast + flips.sum(axis=1)) & 1
    wins = int((noisy_parity == target).sum())
    return MonteCarloEstimate(wins, trials)


@dataclass(frozen=True)
class ExtendedStrategy:
    """Per-player output table over {0, 1, None}; None means no output."""

    outputs: tuple[tuple[int | None, int | None], ...]

    def __post_init__(self) -> None:
        for pair in self.outputs:
            if len(pair) != 2 or any(b not in (0, 1, None) for b in pair):
                raise ValueError(f"bad extended output pair {pair!r}")

    @property
    def n(self) -> int:
        return len(self.outputs)


def extended_answer(strat: ExtendedStrategy, q: Question) -> Answer:
    """Evaluate the table on a question; no-output entries become bot positions."""
    if strat.n != q.n:
        raise ValueError(f"size mismatch: strategy n={strat.n}, question n={q.n}")
    bits = 0
    mask = 0
    for player in range(1, q.n + 1):
        out = strat.outputs[player - 1][q.bit(player)]
        bits <<= 1
        mask <<= 1
        if out is None:
            mask |= 1
        else:
            bits |= out
    return Answer(q.n, bits, mask)


def is_error_free(strat: ExtendedStrategy, cfg: GameConfig) -> bool:
    """True when every legitimate question is either a draw or answered appropriately."""
    return _evaluate_error_free(strat, cfg) is not None


def winnable_questions(strat: ExtendedStrategy, cfg: GameConfig) -> list[Question]:
    """The legitimate questions the table answers appropriately (no draws among them).

    Raises for tables that are not error-free; their win count is meaningless.
    """
    won = _evaluate_error_free(strat, cfg)
    if won is None:
        raise ValueError("strategy is not error-free")
    return [Question(cfg.n, x) for x in won]


def errorfree_exhaustive(cfg: GameConfig) -> tuple[int, list[ExtendedStrategy]]:
    """Sweep all 9^n extended tables and maximize wins among error-free ones.

    Returns the best win count together with every table attaining it.
    """
    n = cfg.n
    if n > extended_limit():
        raise ValueError(f"n={n} exceeds the extended-sweep limit {extended_limit()}")
    questions = legitimate_bits(n)
    targets = [(x.bit_count() >> 1) & 1 for x in questions]
    inputs = [tuple((x >> (n - i)) & 1 for i in range(1, n + 1)) for x in questions]
    pairs = [(a, b) for a in (0, 1, None) for b in (0, 1, None)]
    best = -1
    witnesses: list[tuple] = []
    for combo in itertools.product(pairs, repeat=n):
        wins = 0
        error_free = True
        for inp, target in zip(inputs, targets):
            parity = 0
            draw = False
            for player in range(n):
                out = combo[player][inp[player]]
                if out is None:
                    draw = True
                    break
                parity ^= out
            if draw:
                continue
            if parity == target:
                wins += 1
            else:
                error_free = False
                break
        if not error_free:
            continue
        if wins > best:
            best = wins
            witnesses = [combo]
        elif wins == best:
            witnesses.append(combo)
    return best, [ExtendedStrategy(c) for c in witnesses]


def errorfree_reference_strategy(cfg: GameConfig) -> ExtendedStrategy:
    """The simple optimal error-free table: wins exactly 0^n and 110^(n-2).

    Player 1 always outputs 0, player 2 echoes its input, everyone else
    outputs 0 on input 0 and declines on input 1.
    """
    outputs = [(0, 0), (0, 1)] + [(0, None)] * (cfg.n - 2)
    return ExtendedStrategy(tuple(outputs))


@dataclass(frozen=True)
class ComparisonRecord:
    """One grid point of the quantum-vs-classical comparison."""

    kind: str  # "bitflip" or "detection"
    n: int
    param: float  # p or eta
    quantum: float
    classical: float
    classical_exact: Fraction
    threshold: float
    flag: str  # "quantum-wins" or "classical-reachable"


def compare_report(
    n_values: list[int],
    p_grid: list[float] | None = None,
    eta_grid: list[float] | None = None,
) -> list[ComparisonRecord]:
    """Tabulate noisy-quantum vs classical over grids of reliabilities/efficiencies."""
    records = []
    for n in n_values:
        for p in p_grid or []:
            quantum = bitflip_win_prob(n, BitFlipModel(p))
            bound = classical_bound(n)
            records.append(
                ComparisonRecord(
                    kind="bitflip",
                    n=n,
                    param=p,
                    quantum=quantum,
                    classical=float(bound),
                    classical_exact=bound,
                    threshold=bitflip_threshold(n),
                    flag="quantum-wins" if quantum > bound else "classical-reachable",
                )
            )
        for eta in eta_grid or []:
            quantum = detection_win_prob(n, DetectionModel(eta))
            bound = Fraction(2, 1 << (n - 1))
            records.append(
                ComparisonRecord(
                    kind="detection",
                    n=n,
                    param=eta,
                    quantum=quantum,
                    classical=float(bound),
                    classical_exact=bound,
                    threshold=detection_threshold(n),
                    flag="quantum-wins" if quantum > bound else "classical-reachable",
                )
            )
    return records


def _evaluate_error_free(strat: ExtendedStrategy, cfg: GameConfig) -> list[int] | None:
    """Won question bits if the table is error-free, else None."""
    if strat.n != cfg.n:
        raise ValueError(f"size mismatch: strategy n={strat.n}, config n={cfg.n}")
    won = []
    for x in legitimate_bits(cfg.n):
        a = extended_answer(strat, Question(cfg.n, x))
        if a.has_bot:
            continue
        if a.parity != (x.bit_count() >> 1) & 1:
            return None
        won.append(x)
    return won
