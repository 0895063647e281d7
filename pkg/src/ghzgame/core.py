"""Core definitions of the n-player parity game.

The game hands each of n >= 3 players one input bit.  The collective input
(the question) is promised to contain an even number of 1s, and the players
must produce one output bit each so that the answer's parity equals half the
question's Hamming weight, mod 2.  Everything here is pure integer logic;
no floating point is used anywhere in the game rules.

Bit packing convention: player 1 occupies the most significant of the n bit
positions, so the lexicographic order of bit strings coincides with integer
order of the packed value.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class GameConfig:
    """Parameters of one game instance: just the player count."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"the game needs at least 3 players, got n={self.n}")

    @property
    def num_legitimate(self) -> int:
        """Number of questions satisfying the even-weight promise: 2^(n-1)."""
        return 1 << (self.n - 1)


@dataclass(frozen=True)
class Question:
    """An n-bit collective input, packed into an int (player 1 = MSB)."""

    n: int
    bits: int

    def __post_init__(self) -> None:
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bits {self.bits:#x} out of range for n={self.n}")

    @classmethod
    def from_string(cls, s: str) -> "Question":
        if s.strip("01"):
            raise ValueError(f"question must be a binary string, got {s!r}")
        return cls(len(s), int(s, 2))

    def bit(self, player: int) -> int:
        """Input bit of `player` (1-based)."""
        if not 1 <= player <= self.n:
            raise IndexError(f"player {player} out of range 1..{self.n}")
        return (self.bits >> (self.n - player)) & 1

    @property
    def weight(self) -> int:
        """Hamming weight of the question."""
        return self.bits.bit_count()

    def __str__(self) -> str:
        return format(self.bits, f"0{self.n}b")


BOT = "⊥"  # the no-output symbol in string renderings


@dataclass(frozen=True)
class Answer:
    """An n-symbol collective output over {0, 1, no-output}.

    `bits` holds the 0/1 outputs; positions flagged in `bot_mask` produced
    no output at all, and their `bits` entries must be 0.  Parity is defined
    only when `bot_mask == 0`.
    """

    n: int
    bits: int
    bot_mask: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bits {self.bits:#x} out of range for n={self.n}")
        if not 0 <= self.bot_mask < (1 << self.n):
            raise ValueError(f"bot_mask {self.bot_mask:#x} out of range for n={self.n}")
        if self.bits & self.bot_mask:
            raise ValueError("a no-output position cannot also carry a bit")

    @classmethod
    def from_string(cls, s: str) -> "Answer":
        bits = 0
        mask = 0
        for ch in s:
            bits <<= 1
            mask <<= 1
            if ch == "1":
                bits |= 1
            elif ch in (BOT, "_"):
                mask |= 1
            elif ch != "0":
                raise ValueError(f"bad answer symbol {ch!r}")
        return cls(len(s), bits, mask)

    @property
    def has_bot(self) -> bool:
        return self.bot_mask != 0

    @property
    def parity(self) -> int:
        """Parity of the output bits; undefined when any player gave no output."""
        if self.has_bot:
            raise ValueError("parity is undefined for an answer with no-output symbols")
        return self.bits.bit_count() & 1

    def __str__(self) -> str:
        out = []
        for pos in range(self.n - 1, -1, -1):
            if (self.bot_mask >> pos) & 1:
                out.append(BOT)
            else:
                out.append(str((self.bits >> pos) & 1))
        return "".join(out)


def is_legitimate(q: Question) -> bool:
    """Whether the question satisfies the even-weight promise."""
    return q.weight % 2 == 0


def target_parity(q: Question) -> int:
    """The answer parity a legitimate question demands: (weight/2) mod 2."""
    if not is_legitimate(q):
        raise ValueError(f"question {q} violates the promise (odd weight)")
    return (q.weight >> 1) & 1


def is_appropriate(q: Question, a: Answer) -> bool:
    """Whether the answer wins the round for this question.

    Contract check, not a game outcome: an illegitimate question or an
    answer containing no-output symbols is a caller error and raises.
    """
    if q.n != a.n:
        raise ValueError(f"size mismatch: question n={q.n}, answer n={a.n}")
    if a.has_bot:
        raise ValueError("appropriateness is undefined for an answer with no-output symbols")
    return a.parity == target_parity(q)


def enumerate_legitimate(cfg: GameConfig) -> list[Question]:
    """All even-weight questions, in lexicographic (= integer) order."""
    return [Question(cfg.n, bits) for bits in legitimate_bits(cfg.n)]


def legitimate_bits(n: int) -> list[int]:
    """Packed-int form of enumerate_legitimate, for inner-loop use."""
    return [bits for bits in range(1 << n) if bits.bit_count() % 2 == 0]
