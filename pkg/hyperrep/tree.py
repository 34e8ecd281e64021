"""The free group F_k acting on its Cayley tree.

A 0-hyperbolic model with eta = log(2k-1)/edge, boundary = infinite reduced
words and Patterson-Sullivan measure = the uniform cylinder measure. All
measures, lambda values and Radon-Nikodym factors are exact
:class:`~hyperrep.scalar.ExactScalar` values.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from . import words as W
from .core import SpaceModel
from .errors import DomainError, InfiniteProductError, InsufficientDepthError
from .scalar import ExactScalar
from .words import ReducedWord, Word

logger = logging.getLogger(__name__)


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(str(value))


def _letters_above(value: Fraction, edge: Fraction, strict: bool) -> int:
    """Least integer n with n*edge > value (strict) or >= value."""
    x = value / edge
    n = math.floor(x)
    if strict:
        return n + 1
    return n if n == x else n + 1


@dataclass(frozen=True)
class TreeBoundaryPoint:
    """An infinite reduced word ``head + cycle + cycle + ...``.

    An empty ``cycle`` means the word is only known to depth ``len(head)``;
    reading past it raises :class:`InsufficientDepthError`.
    """
    head: Word
    cycle: Word = ()

    def __post_init__(self):
        full = self.head + self.cycle + self.cycle
        if not W.is_reduced(full):
            raise DomainError('boundary word %r(%r)* is not reduced'
                              % (self.head, self.cycle))

    @property
    def infinite(self) -> bool:
        return bool(self.cycle)

    @property
    def known_depth(self) -> float:
        return math.inf if self.cycle else len(self.head)

    def letter(self, i: int) -> int:
        if i < len(self.head):
            return self.head[i]
        if not self.cycle:
            raise InsufficientDepthError(i + 1, len(self.head))
        return self.cycle[(i - len(self.head)) % len(self.cycle)]

    def prefix(self, n: int) -> Word:
        if n <= len(self.head):
            return self.head[:n]
        return tuple(self.letter(i) for i in range(n))

    def common_prefix(self, letters, limit: int | None = None) -> int:
        """Common prefix with a finite word, capped at ``limit``."""
        n = len(letters) if limit is None else min(len(letters), limit)
        i = 0
        while i < n and self.letter(i) == letters[i]:
            i += 1
        return i

    def common_with(self, other: TreeBoundaryPoint) -> int:
        horizon = (max(len(self.head), len(other.head))
                   + math.lcm(max(len(self.cycle), 1), max(len(other.cycle), 1)))
        if not (self.cycle and other.cycle):
            horizon = min(self.known_depth, other.known_depth)
        i = 0
        while i < horizon:
            if self.letter(i) != other.letter(i):
                return i
            i += 1
        if self.cycle and other.cycle:
            raise InfiniteProductError(self)
        raise InsufficientDepthError(int(horizon) + 1, int(horizon))

    def __str__(self) -> str:
        head = ''.join(W.letter_name(x) for x in self.head)
        if not self.cycle:
            return head + '...?'
        return head + '(' + ''.join(W.letter_name(x) for x in self.cycle) + ')'

    def translate(self, g: Word) -> TreeBoundaryPoint:
        """g . b."""
        if not self.cycle:
            out = W.multiply(g, self.head)
            cancelled = (len(g) + len(self.head) - len(out)) // 2
            if cancelled >= len(self.head) and self.head:
                raise InsufficientDepthError(len(g) + 1, len(self.head))
            return TreeBoundaryPoint(out)
        reps = len(g) // len(self.cycle) + 2
        out = W.multiply(g, self.head + self.cycle * reps)
        return canonical_boundary(out, self.cycle)


def canonical_boundary(head: Word, cycle: Word) -> TreeBoundaryPoint:
    """Shortest head for an eventually periodic word."""
    head = tuple(head)
    cycle = tuple(cycle)
    for p in range(1, len(cycle)):
        if len(cycle) % p == 0 and cycle == cycle[:p] * (len(cycle) // p):
            cycle = cycle[:p]
            break
    while head and cycle and head[-1] == cycle[-1]:
        head = head[:-1]
        cycle = (cycle[-1],) + cycle[:-1]
    return TreeBoundaryPoint(head, cycle)


@dataclass(frozen=True)
class TreePoint:
    """A point at distance ``s`` from e on the geodesic e -> ``path``.

    Canonical: ``path`` has exactly ceil(s / edge) letters.
    """
    path: Word
    s: Fraction

    def is_vertex(self, edge: Fraction) -> bool:
        return self.s == len(self.path) * edge


@dataclass(frozen=True)
class Cylinder:
    prefix: ReducedWord

    def __post_init__(self):
        if not len(self.prefix):
            raise DomainError('cylinders need a nonempty prefix')


class TreeModel(SpaceModel):
    exact = True
    delta = 0.0

    def __init__(self, rank: int = 2, edge_length=1, depth: int = 14) -> None:
        if rank < 2:
            raise DomainError('rank must be at least 2 (eta > 0)')
        self.rank = rank
        self.edge = _frac(edge_length)
        if self.edge <= 0:
            raise DomainError('edge length must be positive')
        self.depth = depth
        self.m = 2 * rank - 1
        self.radius_exact = self.edge / 2
        self.radius = float(self.radius_exact)
        self.eta = math.log(self.m) / float(self.edge)
        self.name = 'free:rank=%d,edge=%s' % (rank, self.edge)
        self.letters = W.alphabet(rank)

    # -- points -----------------------------------------------------------

    @cached_property
    def basepoint(self) -> ReducedWord:
        return ReducedWord((), self.edge)

    def word(self, text: str) -> ReducedWord:
        return ReducedWord.parse(text, self.rank, self.edge)

    def boundary(self, text: str) -> TreeBoundaryPoint:
        """Parse ``ab(ba)`` (periodic tail in parentheses) or ``ab...``."""
        text = text.strip()
        if text.endswith('...'):
            head = text[:-3]
            w = self.word(head).letters
            return canonical_boundary(w, (w[-1],))
        if '(' in text:
            head, _, cyc = text.partition('(')
            return canonical_boundary(self.word(head).letters,
                                      self.word(cyc.rstrip(')')).letters)
        return TreeBoundaryPoint(self.word(text).letters)

    def is_boundary(self, x) -> bool:
        return isinstance(x, TreeBoundaryPoint)

    def contains_point(self, x) -> bool:
        return isinstance(x, (ReducedWord, TreePoint))

    def _point(self, x) -> tuple[Word, Fraction]:
        if isinstance(x, ReducedWord):
            return x.letters, len(x.letters) * self.edge
        if isinstance(x, TreePoint):
            return x.path, x.s
        if isinstance(x, tuple):
            return x, len(x) * self.edge
        raise DomainError('%r is not a point of the tree' % (x,))

    def make_point(self, path: Word, s) -> TreePoint | ReducedWord:
        s = _frac(s)
        n = _letters_above(s, self.edge, strict=False)
        if n > len(path):
            raise DomainError('path %r too short for distance %s' % (path, s))
        path = tuple(path[:n])
        if s == n * self.edge:
            return ReducedWord(path, self.edge)
        return TreePoint(path, s)

    # -- geometry ---------------------------------------------------------

    def _gromov_at_e(self, x, y) -> Fraction:
        bx, by = self.is_boundary(x), self.is_boundary(y)
        if bx and by:
            return x.common_with(y) * self.edge
        if bx or by:
            b, q = (x, y) if bx else (y, x)
            path, s = self._point(q)
            return min(s, b.common_prefix(path) * self.edge)
        px, sx = self._point(x)
        py, sy = self._point(y)
        return min(sx, sy, W.common_prefix(px, py) * self.edge)

    def _translate(self, g: Word, x):
        """g . x for a vertex g."""
        if self.is_boundary(x):
            return x.translate(g)
        path, s = self._point(x)
        if not path:
            return ReducedWord(g, self.edge)
        n = len(path)
        if s == n * self.edge:
            return ReducedWord(W.multiply(g, path), self.edge)
        # interior of the edge path[:n-1] -> path
        lo = W.multiply(g, path[:-1])
        hi = W.multiply(g, path)
        frac = s - (n - 1) * self.edge
        if len(hi) > len(lo):
            return self.make_point(hi, len(lo) * self.edge + frac)
        return self.make_point(lo, len(hi) * self.edge + self.edge - frac)

    def gromov(self, x, y, base) -> Fraction:
        base_path, base_s = self._point(base)
        if base_s != len(base_path) * self.edge:
            raise DomainError('the tree model needs a vertex as base point')
        if base_path:
            g = W.inverse(base_path)
            x, y = self._translate(g, x), self._translate(g, y)
        return self._gromov_at_e(x, y)

    def distance(self, x, y) -> Fraction:
        _, sx = self._point(x)
        _, sy = self._point(y)
        return sx + sy - 2 * self._gromov_at_e(x, y)

    def norm(self, q) -> float:
        return float(self._point(q)[1])

    def norm_exact(self, q) -> Fraction:
        return self._point(q)[1]

    def busemann(self, b, x, y) -> Fraction:
        def beta_e(q):
            return self._point(q)[1] - 2 * self._gromov_at_e(q, b)
        return beta_e(y) - beta_e(x)

    def direction(self, q) -> TreeBoundaryPoint:
        """Ray through q continued by repeating its last letter."""
        if self.is_boundary(q):
            return q
        path, s = self._point(q)
        if not path:
            raise DomainError('the basepoint has no direction')
        return canonical_boundary(path, (path[-1],))

    def along(self, q, s) -> TreePoint | ReducedWord:
        z = self.direction(q)
        s = _frac(s)
        n = _letters_above(s, self.edge, strict=False)
        return self.make_point(z.prefix(n), s)

    # -- measure ----------------------------------------------------------

    def cylinder_measure(self, c: Cylinder | Word | ReducedWord) -> ExactScalar:
        """(1/2k)(2k-1)^(1-n) for a depth-n cylinder."""
        if isinstance(c, Cylinder):
            c = c.prefix
        return self.depth_measure(len(c))

    def depth_measure(self, n: int) -> ExactScalar:
        if n <= 0:
            return ExactScalar(1, 0, self.m)
        return ExactScalar(Fraction(1, 2 * self.rank)
                           * Fraction(self.m) ** (1 - n), 0, self.m)

    def ball_depth(self, radius: float, closed: bool = False) -> int:
        """Number of letters a point must share with the centre."""
        x = -math.log(radius) / float(self.edge)
        n = round(x)
        if abs(x - n) < 1e-9:
            return n if closed else n + 1
        return math.floor(x) + 1 if x > 0 else 0

    def ball_measure(self, center, radius: float, closed: bool = False):
        n = max(self.ball_depth(radius, closed), 0)
        if n == 0:
            return ExactScalar(1, 0, self.m)
        center.prefix(n)
        return self.depth_measure(n)

    def radon_nikodym(self, q, b: TreeBoundaryPoint) -> ExactScalar:
        """d nu_q / d nu_p (b) = (2k-1)^(2j - |q|)."""
        path = self._vertex(q)
        j = self._match(path, b)
        return ExactScalar(Fraction(self.m) ** (2 * j - len(path)), 0, self.m)

    def lambda_exact(self, q, b: TreeBoundaryPoint) -> ExactScalar:
        """lambda^q(b) = exp(-eta beta_b(p,q)/2) = (2k-1)^((2j - |q|)/2)."""
        path = self._vertex(q)
        return ExactScalar.half_power(self.m, 2 * self._match(path, b)
                                      - len(path))

    def _vertex(self, q) -> Word:
        path, s = self._point(q)
        if s != len(path) * self.edge:
            raise DomainError('%r is not a vertex' % (q,))
        return path

    @staticmethod
    def _match(path: Word, b: TreeBoundaryPoint) -> int:
        j = 0
        n = len(path)
        while j < n:
            try:
                letter = b.letter(j)
            except InsufficientDepthError:
                raise InsufficientDepthError(n, j) from None
            if letter != path[j]:
                break
            j += 1
        return j

    # -- enumeration ------------------------------------------------------

    def annulus_lengths(self, t) -> list[int]:
        """Word lengths n with n*edge in (t - R, t + R)."""
        t = _frac(t)
        R = self.radius_exact
        if t <= R:
            raise DomainError('annulus needs t > R = %s, got %s' % (R, t))
        lo = _letters_above(t - R, self.edge, strict=True)
        out = []
        n = lo
        while n * self.edge < t + R:
            out.append(n)
            n += 1
        return out

    def enumerate_annulus(self, t, first=None) -> list[ReducedWord]:
        out = []
        for n in self.annulus_lengths(t):
            out.extend(ReducedWord(w, self.edge)
                       for w in W.words_of_length(self.rank, n, first))
        return out

    def iter_annulus(self, t, first=None) -> Iterator[Word]:
        for n in self.annulus_lengths(t):
            yield from W.words_of_length(self.rank, n, first)

    def annulus_size(self, t) -> int:
        return sum(W.sphere_size(self.rank, n) for n in self.annulus_lengths(t))

    def ball_size(self, radius, strict: bool = True) -> int:
        """|{gamma : |gamma| < radius}| (or <= when not strict)."""
        r = _frac(radius)
        n_max = _letters_above(r, self.edge, strict=not strict) - 1
        return sum(W.sphere_size(self.rank, n) for n in range(n_max + 1))

    def transfer_matrix(self) -> np.ndarray:
        size = len(self.letters)
        A = np.ones((size, size), dtype=object)
        for i, a in enumerate(self.letters):
            A[i, self.letters.index(-a)] = 0
        return A

    def transfer_matrix_count(self, first, last, n: int) -> int:
        """Reduced words of length n with given first and last letters.

        ``first``/``last`` may be a letter, an iterable of letters or None.
        """
        if n < 1:
            raise DomainError('length must be at least 1')
        idx = {a: i for i, a in enumerate(self.letters)}

        def mask(spec):
            v = np.zeros(len(self.letters), dtype=object)
            if spec is None:
                v[:] = 1
                return v
            if isinstance(spec, int):
                spec = (spec,)
            for a in spec:
                v[idx[a]] = 1
            return v

        A = np.linalg.matrix_power(self.transfer_matrix(), n - 1)
        return int(mask(first).dot(A).dot(mask(last)))

    # -- sampling ---------------------------------------------------------

    def random_word(self, rng: np.random.Generator, n: int) -> Word:
        out: list[int] = []
        for _ in range(n):
            choices = [a for a in self.letters if not out or a != -out[-1]]
            out.append(choices[int(rng.integers(len(choices)))])
        return tuple(out)

    def random_points(self, rng, n, max_norm):
        max_len = max(int(max_norm / float(self.edge)), 1)
        pts = []
        for _ in range(n):
            length = int(rng.integers(0, max_len + 1))
            w = self.random_word(rng, length)
            if w and rng.random() < 0.5:
                pts.append(self.make_point(w, len(w) * self.edge
                                           - self.edge / 2))
            else:
                pts.append(ReducedWord(w, self.edge))
        return pts

    def random_boundary(self, rng, n, head_length: int | None = None):
        head_length = self.depth if head_length is None else head_length
        pts = []
        for _ in range(n):
            w = self.random_word(rng, head_length + 1)
            pts.append(canonical_boundary(w[:-1], (w[-1],)))
        return pts

    def boundary_near(self, b, radius, rng, n):
        """Random continuations of the prefix b must keep to be within radius."""
        j = max(math.ceil(-math.log(radius) / float(self.edge) - 1e-12), 0)
        head = b.prefix(j)
        out = [b]
        for _ in range(n):
            tail: list[int] = list(head)
            while len(tail) < j + self.depth + 1:
                choices = [a for a in self.letters
                           if not tail or a != -tail[-1]]
                tail.append(choices[int(rng.integers(len(choices)))])
            out.append(canonical_boundary(tuple(tail[:-1]), (tail[-1],)))
        return out

    def points_near(self, q, radius, rng, n):
        radius = _frac(radius)
        path, s = self._point(q)
        k = _letters_above(s, self.edge, strict=False)
        seeds = {tuple(path[:k]), tuple(path[:max(k - 1, 0)])}
        horizon = radius + 2 * self.edge
        seen = set(seeds)
        frontier = list(seeds)
        while frontier:
            nxt = []
            for v in frontier:
                for a in self.letters:
                    u = W.multiply(v, (a,))
                    if u in seen:
                        continue
                    if self.distance(ReducedWord(u, self.edge), q) <= horizon:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        candidates = []
        for v in sorted(seen, key=lambda w: (len(w), w)):
            vert = ReducedWord(v, self.edge)
            candidates.append(vert)
            if v:
                candidates.append(self.make_point(v, len(v) * self.edge
                                                  - self.edge / 2))
        candidates = [c for c in candidates if self.distance(c, q) <= radius]
        if len(candidates) > n:
            pick = sorted(rng.choice(len(candidates), size=n, replace=False))
            candidates = [candidates[i] for i in pick]
        return [q] + candidates


class CylinderSet:
    """A finite disjoint union of cylinders, stored at a common depth.

    Cylinders are clopen, so every such set has null boundary.
    """

    def __init__(self, model: TreeModel, depth: int,
                 cells: Iterable[Word]) -> None:
        self.model = model
        self.depth = depth
        self.cells = frozenset(tuple(c) for c in cells)
        for c in self.cells:
            if len(c) != depth:
                raise DomainError('cell %r is not at depth %d' % (c, depth))

    @classmethod
    def whole(cls, model: TreeModel) -> CylinderSet:
        return cls(model, 0, [()])

    @classmethod
    def empty(cls, model: TreeModel) -> CylinderSet:
        return cls(model, 0, [])

    @classmethod
    def from_prefixes(cls, model: TreeModel,
                      prefixes: Iterable[Word]) -> CylinderSet:
        prefixes = [tuple(p) for p in prefixes]
        if not prefixes:
            return cls.empty(model)
        depth = max(len(p) for p in prefixes)
        cells = set()
        for p in prefixes:
            cells.update(_extend(model, p, depth))
        return cls(model, depth, cells)

    @classmethod
    def cylinder(cls, model: TreeModel, prefix) -> CylinderSet:
        if isinstance(prefix, str):
            prefix = model.word(prefix)
        if isinstance(prefix, (ReducedWord, Cylinder)):
            prefix = prefix.prefix.letters if isinstance(prefix, Cylinder) \
                else prefix.letters
        return cls(model, len(prefix), [prefix])

    def refine(self, depth: int) -> CylinderSet:
        if depth < self.depth:
            raise DomainError('cannot coarsen a cylinder set by refining')
        if depth == self.depth:
            return self
        cells = set()
        for c in self.cells:
            cells.update(_extend(self.model, c, depth))
        return CylinderSet(self.model, depth, cells)

    def _aligned(self, other: CylinderSet) -> tuple[CylinderSet, CylinderSet]:
        d = max(self.depth, other.depth)
        return self.refine(d), other.refine(d)

    def is_empty(self) -> bool:
        return not self.cells

    def is_whole(self) -> bool:
        return len(self.cells) == W.sphere_size(self.model.rank, self.depth)

    def contains(self, b: TreeBoundaryPoint) -> bool:
        return b.prefix(self.depth) in self.cells

    __contains__ = contains

    def contains_word(self, w: Word) -> bool:
        """Membership of the direction z_p^w, for |w| >= 1."""
        if len(w) >= self.depth:
            return tuple(w[:self.depth]) in self.cells
        return self.contains(self.model.direction(ReducedWord(tuple(w),
                                                               self.model.edge)))

    def measure(self) -> ExactScalar:
        return len(self.cells) * self.model.depth_measure(self.depth)

    def complement(self) -> CylinderSet:
        every = set(W.words_of_length(self.model.rank, self.depth))
        return CylinderSet(self.model, self.depth, every - self.cells)

    def __and__(self, other: CylinderSet) -> CylinderSet:
        a, b = self._aligned(other)
        return CylinderSet(self.model, a.depth, a.cells & b.cells)

    def __or__(self, other: CylinderSet) -> CylinderSet:
        a, b = self._aligned(other)
        return CylinderSet(self.model, a.depth, a.cells | b.cells)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CylinderSet):
            return NotImplemented
        a, b = self._aligned(other)
        return a.cells == b.cells

    def __hash__(self) -> int:
        return hash((self.depth, self.cells))

    def thicken(self, a) -> CylinderSet:
        """U(a): points sharing more than a/edge letters with some cell."""
        a = _frac(a)
        j = _letters_above(a, self.model.edge, strict=True)
        if j >= self.depth:
            return self
        return CylinderSet.from_prefixes(self.model,
                                         {c[:j] for c in self.cells})

    def distance_to(self, b: TreeBoundaryPoint) -> float:
        """sigma_p(b, U)."""
        if self.is_empty():
            return math.inf
        if self.contains(b):
            return 0.0
        best = max(b.common_prefix(c) for c in self.cells)
        return math.exp(-best * float(self.model.edge))

    def labels(self) -> list[str]:
        return sorted(''.join(W.letter_name(x) for x in c) or 'B'
                      for c in self.cells)

    def __repr__(self) -> str:
        return 'CylinderSet(depth=%d, %s)' % (self.depth, ','.join(self.labels()))


def _extend(model: TreeModel, prefix: Word, depth: int) -> Iterator[Word]:
    """All depth-``depth`` reduced words starting with ``prefix``."""
    if len(prefix) >= depth:
        yield tuple(prefix[:depth])
        return
    if not prefix:
        yield from W.words_of_length(model.rank, depth)
        return
    stack = [tuple(prefix)]
    while stack:
        w = stack.pop()
        if len(w) == depth:
            yield w
            continue
        for a in model.letters:
            if a != -w[-1]:
                stack.append(w + (a,))


def match_classes(model: TreeModel, q: Word, n: int) -> dict[int, int]:
    """Count length-n words w by j = common prefix of z_p^w with q, capped at |q|.

    Exact and O(n); the direction of w repeats its last letter.
    """
    q = tuple(q)
    nq = len(q)
    m = model.m
    counts: dict[int, int] = {}
    if n <= 0:
        return {0: 1}
    if nq == 0:
        return {0: W.sphere_size(model.rank, n)}
    for j in range(min(n, nq)):
        choices = 2 * model.rank - 1 if j == 0 else 2 * model.rank - 2
        if choices:
            counts[j] = counts.get(j, 0) + choices * m ** (n - j - 1)
    if n <= nq:
        j = n
        while j < nq and q[j] == q[n - 1]:
            j += 1
        counts[j] = counts.get(j, 0) + 1
    else:
        counts[nq] = counts.get(nq, 0) + m ** (n - nq)
    return counts
