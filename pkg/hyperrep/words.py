"""Reduced words in a free group on letters +-1..+-k.

Letter ``i > 0`` is the generator g_i, ``-i`` its inverse. As strings,
generators are lowercase and inverses uppercase (``aB`` = g_1 g_2^-1).
"""
from __future__ import annotations

import string
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import DomainError

Word = tuple


def alphabet(rank: int) -> list[int]:
    """Letters in lexicographic order a, A, b, B, ..."""
    out = []
    for i in range(1, rank + 1):
        out.extend((i, -i))
    return out


def letter_name(letter: int) -> str:
    ch = string.ascii_lowercase[abs(letter) - 1]
    return ch if letter > 0 else ch.upper()


def parse_letter(ch: str, rank: int) -> int:
    idx = string.ascii_lowercase.find(ch.lower())
    if idx < 0 or idx >= rank:
        raise DomainError('letter %r is not in the rank-%d alphabet'
                          % (ch, rank))
    return idx + 1 if ch.islower() else -(idx + 1)


def reduce(letters: Sequence[int]) -> Word:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_reduced(letters: Sequence[int]) -> bool:
    return all(letters[i] != -letters[i + 1] for i in range(len(letters) - 1))


def inverse(letters: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(letters))


def multiply(u: Sequence[int], v: Sequence[int]) -> Word:
    i = 0
    n = min(len(u), len(v))
    while i < n and u[len(u) - 1 - i] == -v[i]:
        i += 1
    return tuple(u[:len(u) - i]) + tuple(v[i:])


def common_prefix(u: Sequence[int], v: Sequence[int]) -> int:
    n = min(len(u), len(v))
    i = 0
    while i < n and u[i] == v[i]:
        i += 1
    return i


def cyclic_reduction(letters: Sequence[int]) -> Word:
    w = tuple(letters)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return w


def words_of_length(rank: int, n: int, first=None) -> Iterator[Word]:
    """All reduced words of length n in lexicographic order.

    ``first`` optionally restricts the first letter (used to partition the
    enumeration across workers).
    """
    letters = alphabet(rank)
    if n == 0:
        if first is None:
            yield ()
        return
    starts = letters if first is None else [first]
    stack: list[tuple[Word, int]] = []
    for a in reversed(starts):
        stack.append(((a,), 1))
    while stack:
        w, depth = stack.pop()
        if depth == n:
            yield w
            continue
        last = w[-1]
        for a in reversed(letters):
            if a != -last:
                stack.append((w + (a,), depth + 1))


def sphere_size(rank: int, n: int) -> int:
    if n == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (n - 1)


@dataclass(frozen=True)
class ReducedWord:
    """A free-group element; doubles as a tree vertex and a cylinder label."""
    letters: Word = ()
    edge_length: Fraction = field(default=Fraction(1), compare=False)

    def __post_init__(self):
        if not is_reduced(self.letters):
            raise DomainError('word %r is not reduced' % (self.letters,))

    @classmethod
    def parse(cls, text: str, rank: int,
              edge_length: Fraction = Fraction(1)) -> ReducedWord:
        text = text.strip()
        if text in ('', 'e', '1'):
            return cls((), edge_length)
        return cls(tuple(parse_letter(ch, rank) for ch in text), edge_length)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return ''.join(letter_name(x) for x in self.letters) or 'e'

    @property
    def length(self) -> Fraction:
        """|gamma|_p = d(p, gamma p)."""
        return len(self.letters) * self.edge_length

    def inverse(self) -> ReducedWord:
        return ReducedWord(inverse(self.letters), self.edge_length)

    def __mul__(self, other: ReducedWord) -> ReducedWord:
        return ReducedWord(multiply(self.letters, other.letters),
                           self.edge_length)

    def __pow__(self, n: int) -> ReducedWord:
        base = self if n >= 0 else self.inverse()
        out = ReducedWord((), self.edge_length)
        for _ in range(abs(n)):
            out = out * base
        return out
