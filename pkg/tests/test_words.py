import pytest

from hyperrep import words as W
from hyperrep.errors import DomainError
from hyperrep.words import ReducedWord


def test_parse_and_print():
    w = ReducedWord.parse('aBA', 2)
    assert w.letters == (1, -2, -1)
    assert str(w) == 'aBA'
    assert str(ReducedWord.parse('e', 2)) == 'e'


def test_parse_rejects_letters_outside_rank():
    with pytest.raises(DomainError):
        ReducedWord.parse('c', 2)


def test_unreduced_words_are_rejected():
    with pytest.raises(DomainError):
        ReducedWord((1, -1))


def test_multiply_cancels():
    a = ReducedWord.parse('ab', 2)
    b = ReducedWord.parse('Ba', 2)
    assert str(a * b) == 'aa'
    assert str(a * a.inverse()) == 'e'


def test_power_and_cyclic_reduction():
    w = ReducedWord.parse('aBA', 2)
    assert str(w ** 3) == 'aBBBA'
    assert W.cyclic_reduction(w.letters) == (-2,)


def test_sphere_sizes_match_enumeration():
    for n in range(5):
        words = list(W.words_of_length(2, n))
        assert len(words) == W.sphere_size(2, n)
        assert len(set(words)) == len(words)
        assert all(W.is_reduced(w) for w in words)


def test_first_letter_partition_covers_the_sphere():
    whole = list(W.words_of_length(2, 4))
    parts = [w for a in W.alphabet(2) for w in W.words_of_length(2, 4, a)]
    assert parts == whole


def test_common_prefix():
    assert W.common_prefix((1, 2, 1), (1, 2, -1)) == 2
    assert W.common_prefix((), (1,)) == 0
