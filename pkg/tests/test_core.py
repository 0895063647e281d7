import pytest
from hypothesis import given
from hypothesis import strategies as st

from ghzgame.core import (
    Answer,
    GameConfig,
    Question,
    enumerate_legitimate,
    is_appropriate,
    is_legitimate,
    legitimate_bits,
    target_parity,
)


def test_config_rejects_small_n():
    with pytest.raises(ValueError):
        GameConfig(2)
    assert GameConfig(3).num_legitimate == 4


def test_legitimacy_examples():
    assert is_legitimate(Question.from_string("000"))
    assert not is_legitimate(Question.from_string("100"))
    assert is_legitimate(Question.from_string("110"))


def test_appropriate_examples():
    assert is_appropriate(Question.from_string("0000"), Answer.from_string("0000"))
    assert is_appropriate(Question.from_string("110"), Answer.from_string("100"))
    assert not is_appropriate(Question.from_string("110"), Answer.from_string("110"))


def test_appropriate_rejects_contract_violations():
    with pytest.raises(ValueError):
        is_appropriate(Question.from_string("100"), Answer.from_string("000"))
    with pytest.raises(ValueError):
        is_appropriate(Question.from_string("110"), Answer.from_string("1⊥0"))
    with pytest.raises(ValueError):
        is_appropriate(Question.from_string("110"), Answer.from_string("10"))


def test_enumerate_legitimate_n3():
    qs = [str(q) for q in enumerate_legitimate(GameConfig(3))]
    assert qs == ["000", "011", "101", "110"]


@pytest.mark.parametrize("n", range(3, 11))
def test_legitimate_count(n):
    assert len(enumerate_legitimate(GameConfig(n))) == 2 ** (n - 1)


def test_enumeration_is_sorted():
    bits = legitimate_bits(6)
    assert bits == sorted(bits)


def test_answer_string_roundtrip():
    a = Answer.from_string("1⊥0")
    assert str(a) == "1⊥0"
    assert a.has_bot
    with pytest.raises(ValueError):
        a.parity


def test_answer_rejects_bit_under_bot():
    with pytest.raises(ValueError):
        Answer(3, bits=0b100, bot_mask=0b100)


@given(st.integers(3, 10), st.data())
def test_permutation_invariance(n, data):
    # relabeling players together on question and answer never changes the outcome
    qbits = data.draw(st.integers(0, 2**n - 1).filter(lambda b: b.bit_count() % 2 == 0))
    abits = data.draw(st.integers(0, 2**n - 1))
    perm = data.draw(st.permutations(range(1, n + 1)))
    q = Question(n, qbits)
    a = Answer(n, abits)
    q2 = Question(n, _permute(qbits, perm, n))
    a2 = Answer(n, _permute(abits, perm, n))
    assert is_appropriate(q, a) == is_appropriate(q2, a2)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_half_of_answers_appropriate(n):
    for q in enumerate_legitimate(GameConfig(n)):
        wins = sum(1 for a in range(2**n) if is_appropriate(q, Answer(n, a)))
        assert wins == 2 ** (n - 1)


def test_target_parity_is_weight_mod4():
    assert target_parity(Question.from_string("0000")) == 0
    assert target_parity(Question.from_string("110")) == 1
    assert target_parity(Question.from_string("1111")) == 0


def _permute(bits: int, perm, n: int) -> int:
    out = 0
    for new_pos, old_player in enumerate(perm, start=1):
        bit = (bits >> (n - old_player)) & 1
        out |= bit << (n - new_pos)
    return out
