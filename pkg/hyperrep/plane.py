"""Cocompact Fuchsian groups acting on the hyperbolic plane.

Group elements are real SL(2,R) matrices acting on the upper half-plane;
points live in the unit disk through the identification
``u = i(z - i)/(z + i)`` so the basepoint i becomes the origin and nu_p is the
normalized angle measure. Curvature is -1, so eta = 1.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import bson
import numpy as np
from scipy.spatial import cKDTree

from .core import SpaceModel
from .errors import (CacheExhaustedError, DomainError, InfiniteProductError)
from .parallel import partitioned_map

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
CACHE_VERSION = 1
# frontier rows per work unit, independent of the pool size
FRONTIER_CHUNK = 4096

_PHI = np.array([[1j, 1], [1, 1j]])
_PHI_INV = np.array([[1j, -1], [-1, 1j]])


@dataclass(frozen=True)
class MobiusIsometry:
    """A real 2x2 matrix of determinant one, identified up to sign."""
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if abs(self.det - 1) > 1e-12 * max(1.0, self.scale ** 2):
            raise DomainError('determinant %r is not one' % (self.det,))

    @classmethod
    def from_array(cls, m: np.ndarray) -> MobiusIsometry:
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]),
                   float(m[1, 1]))

    @classmethod
    def from_disk(cls, u: np.ndarray) -> MobiusIsometry:
        """Real form of an SU(1,1) matrix acting on the disk."""
        g = -(_PHI_INV @ u @ _PHI) / 2
        if np.max(np.abs(g.imag)) > 1e-9 * max(1.0, np.max(np.abs(g))):
            raise DomainError('matrix does not preserve the disk')
        return cls.from_array(g.real)

    @classmethod
    def identity(cls) -> MobiusIsometry:
        return cls(1.0, 0.0, 0.0, 1.0)

    def array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def scale(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def __matmul__(self, other: MobiusIsometry) -> MobiusIsometry:
        return MobiusIsometry.from_array(self.array() @ other.array())

    def inverse(self) -> MobiusIsometry:
        return MobiusIsometry(self.d, -self.b, -self.c, self.a)

    def power(self, n: int) -> MobiusIsometry:
        base = self if n >= 0 else self.inverse()
        return MobiusIsometry.from_array(
            np.linalg.matrix_power(base.array(), abs(n)))

    def displacement(self) -> float:
        """d(p, g p) for p the disk origin."""
        s = (self.a ** 2 + self.b ** 2 + self.c ** 2 + self.d ** 2) / 2
        return math.acosh(max(s, 1.0))

    def distance_to_identity(self) -> float:
        """Entrywise distance to +-identity."""
        m = self.array()
        return min(np.max(np.abs(m - np.eye(2))), np.max(np.abs(m + np.eye(2))))

    def disk_matrix(self) -> np.ndarray:
        """The same map as an SU(1,1)-type matrix acting on the disk."""
        return _PHI @ self.array() @ _PHI_INV / -2

    def act(self, u: complex) -> complex:
        m = self.disk_matrix()
        return complex((m[0, 0] * u + m[0, 1]) / (m[1, 0] * u + m[1, 1]))

    def act_boundary(self, angle: float) -> float:
        v = self.act(complex(math.cos(angle), math.sin(angle)))
        return CirclePoint.canonical(math.atan2(v.imag, v.real)).angle


@dataclass(frozen=True)
class CirclePoint:
    """A boundary point of the disk; ``angle`` in [0, 2 pi)."""
    angle: float

    @classmethod
    def canonical(cls, angle: float) -> CirclePoint:
        a = math.fmod(angle, TWO_PI)
        if a < 0:
            a += TWO_PI
        if a >= TWO_PI:
            a = 0.0
        return cls(a)


def _su11_translation(length: float, angle: float) -> np.ndarray:
    ch, sh = math.cosh(length / 2), math.sinh(length / 2)
    e = np.exp(1j * angle)
    return np.array([[ch, e * sh], [np.conj(e) * sh, ch]])


def _su11_rotation(angle: float) -> np.ndarray:
    return np.array([[np.exp(1j * angle / 2), 0], [0, np.exp(-1j * angle / 2)]])


@dataclass(frozen=True)
class GroupPreset:
    name: str
    generators: dict          # letter -> MobiusIsometry (inverses uppercase)
    relations: tuple          # words that must evaluate to +-identity
    orders: dict              # letter -> finite order, if any
    radius: float             # circumradius of the fundamental domain
    systole: float            # shortest translation length (0 with torsion)


def _octagon() -> GroupPreset:
    # opposite-side pairings of the regular octagon with angles pi/4
    half = math.acosh(1 + math.sqrt(2))
    gens = {}
    for k, letter in enumerate('abcd'):
        g = MobiusIsometry.from_disk(_su11_translation(2 * half, k * math.pi / 4))
        gens[letter] = g
        gens[letter.upper()] = g.inverse()
    radius = math.acosh(3 + 2 * math.sqrt(2))
    return GroupPreset('genus2-octagon', gens, ('aBcDAbCd',), {}, radius,
                       2 * half)


def _triangle_237() -> GroupPreset:
    # vertex of angle pi/7 at the origin, vertex of angle pi/3 on the real axis
    pq = math.acosh(1 / (math.tan(math.pi / 7) * math.tan(math.pi / 3)))
    pr = math.acosh(0.5 / math.sin(math.pi / 7))
    x = _su11_rotation(2 * math.pi / 7)
    t = _su11_translation(pq, 0.0)
    y = t @ _su11_rotation(2 * math.pi / 3) @ np.linalg.inv(t)
    gx = MobiusIsometry.from_disk(x)
    gy = MobiusIsometry.from_disk(y)
    gz = (gx @ gy).inverse()
    gens = {'a': gz, 'b': gy, 'c': gx}
    for k in 'abc':
        gens[k.upper()] = gens[k].inverse()
    return GroupPreset('triangle-2-3-7', gens, ('cba',),
                       {'a': 2, 'b': 3, 'c': 7}, max(pq, pr), 0.0)


PRESETS: dict[str, Callable[[], GroupPreset]] = {
    'genus2-octagon': _octagon,
    'triangle-2-3-7': _triangle_237,
}
ALIASES = {'genus2': 'genus2-octagon', 'triangle237': 'triangle-2-3-7'}


def build_group(preset: str) -> GroupPreset:
    key = ALIASES.get(preset, preset)
    if key not in PRESETS:
        raise DomainError('unknown group preset %r (known: %s)'
                          % (preset, ', '.join(sorted(PRESETS))))
    return PRESETS[key]()


def evaluate_word(preset: GroupPreset, word: str) -> MobiusIsometry:
    out = MobiusIsometry.identity()
    for letter in word:
        out = out @ preset.generators[letter]
    return out


def relation_residual(preset: GroupPreset) -> float:
    worst = 0.0
    for rel in preset.relations:
        worst = max(worst, evaluate_word(preset, rel).distance_to_identity())
    for letter, order in preset.orders.items():
        worst = max(worst,
                    preset.generators[letter].power(order).distance_to_identity())
    return worst


def _hyperboloid(mats: np.ndarray) -> np.ndarray:
    """Hyperboloid coordinates of g . p for a stack of real matrices."""
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    x0 = (a * a + b * b + c * c + d * d) / 2
    x1 = a * c + b * d
    x2 = (a * a + b * b - c * c - d * d) / 2
    return np.stack([x0, x1, x2], axis=1)


def _disk_angles(coords: np.ndarray) -> np.ndarray:
    ang = np.arctan2(coords[:, 2], coords[:, 1])
    return np.mod(ang, TWO_PI)


@dataclass
class OrbitCache:
    """Orbit of the basepoint, one element per orbit point, sorted by distance."""
    preset: str
    t_max: float
    tolerance: float
    words: list = field(default_factory=list)
    matrices: np.ndarray = field(default_factory=lambda: np.zeros((0, 2, 2)))
    distances: np.ndarray = field(default_factory=lambda: np.zeros(0))
    separation: float = 0.0

    @cached_property
    def coords(self) -> np.ndarray:
        return _hyperboloid(self.matrices)

    @cached_property
    def angles(self) -> np.ndarray:
        """Directions z_p^{gamma p}."""
        out = _disk_angles(self.coords)
        out[self.distances < 1e-12] = np.nan
        return out

    @cached_property
    def inverse_angles(self) -> np.ndarray:
        """Directions z_p^{gamma^-1 p}."""
        a, b, c, d = (self.matrices[:, 0, 0], self.matrices[:, 0, 1],
                      self.matrices[:, 1, 0], self.matrices[:, 1, 1])
        inv = np.stack([np.stack([d, -b], 1), np.stack([-c, a], 1)], 1)
        out = _disk_angles(_hyperboloid(inv))
        out[self.distances < 1e-12] = np.nan
        return out

    def __len__(self) -> int:
        return len(self.words)

    def window(self, lo: float, hi: float) -> np.ndarray:
        """Indices with distance in the open window (lo, hi)."""
        if hi > self.t_max:
            raise CacheExhaustedError(hi, self.t_max)
        i0 = np.searchsorted(self.distances, lo, side='right')
        i1 = np.searchsorted(self.distances, hi, side='left')
        return np.arange(i0, i1)

    def count_within(self, t: float) -> int:
        if t > self.t_max:
            raise CacheExhaustedError(t, self.t_max)
        return int(np.searchsorted(self.distances, t, side='right'))

    def to_bson(self) -> bytes:
        return bson.encode({
            'version': CACHE_VERSION,
            'preset': self.preset,
            't_max': self.t_max,
            'tolerance': self.tolerance,
            'separation': self.separation,
            'words': self.words,
            'matrices': np.ascontiguousarray(self.matrices, '<f8').tobytes(),
        })

    @classmethod
    def from_bson(cls, payload: bytes) -> OrbitCache:
        doc = bson.decode(payload)
        if doc.get('version') != CACHE_VERSION:
            raise DomainError('orbit cache version %r is not supported'
                              % (doc.get('version'),))
        mats = np.frombuffer(doc['matrices'], dtype='<f8').reshape(-1, 2, 2)
        cache = cls(doc['preset'], doc['t_max'], doc['tolerance'],
                    list(doc['words']), mats.copy(),
                    separation=doc['separation'])
        cache.distances = np.array([MobiusIsometry.from_array(m).displacement()
                                    for m in cache.matrices])
        return cache

    def matches(self, preset: str, t_max: float, tolerance: float) -> bool:
        return (self.preset == preset and self.t_max >= t_max
                and self.tolerance == tolerance)


def _element_keys(mats: np.ndarray) -> np.ndarray:
    flat = mats.reshape(-1, 4)
    return np.concatenate([flat, -flat])


def _merge_points(coords: np.ndarray, thr: float) -> np.ndarray:
    """Mask keeping the first of each cluster of orbit points closer than thr."""
    keep = np.ones(len(coords), dtype=bool)
    if len(coords) < 2:
        return keep
    for i, j in sorted(cKDTree(coords).query_pairs(thr)):
        if not keep[i]:
            continue
        u, v = coords[i], coords[j]
        lorentz = u[0] * v[0] - u[1] * v[1] - u[2] * v[2]
        if math.acosh(max(lorentz, 1.0)) < thr:
            keep[j] = False
    return keep


def _expand_frontier(chunk: np.ndarray, gens: np.ndarray,
                     limit: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right-multiply a frontier chunk by every generator; keep d <= limit."""
    cand = np.einsum('fij,gjk->fgik', chunk, gens).reshape(-1, 2, 2)
    dist = np.arccosh(np.maximum(_hyperboloid(cand)[:, 0], 1.0))
    keep = np.flatnonzero(dist <= limit)
    return cand[keep], dist[keep], keep


def build_orbit_cache(preset: GroupPreset, t_max: float,
                      tolerance: float = 1e-9, margin: float | None = None,
                      max_elements: int = 5_000_000,
                      threads: int = 1) -> OrbitCache:
    """Breadth-first word enumeration of the orbit of the basepoint.

    The frontier is deduplicated by group element (matrix entries up to
    sign); the stored orbit is deduplicated by orbit-point proximity with
    threshold half the minimal observed nonzero separation. Candidates
    farther than ``t_max + margin`` are pruned (default margin: half the
    systole, or the domain radius for groups with torsion). The expansion
    stops when two consecutive word lengths add no element within ``t_max``.
    Frontier chunks are expanded over ``threads`` processes; deduplication
    against the index stays in the calling process.
    """
    if margin is None:
        margin = preset.systole / 2 if preset.systole else preset.radius
    limit = t_max + margin
    letters = sorted(preset.generators)
    gens = np.stack([preset.generators[k].array() for k in letters])

    frontier = np.eye(2)[None]
    frontier_words = ['']
    all_mats = [frontier]
    all_words = ['']
    trees = [cKDTree(_element_keys(frontier))]
    quiet = 0
    depth = 0
    total = 1
    while len(frontier) and quiet < 2:
        depth += 1
        starts = range(0, len(frontier), FRONTIER_CHUNK)
        parts = partitioned_map(_expand_frontier,
                                [frontier[s:s + FRONTIER_CHUNK] for s in starts],
                                threads, gens=gens, limit=limit)
        cand = np.concatenate([p[0] for p in parts])
        dist = np.concatenate([p[1] for p in parts])
        cand_words = [frontier_words[(s + i) // len(letters)]
                      + letters[(s + i) % len(letters)]
                      for s, p in zip((s * len(letters) for s in starts), parts)
                      for i in p[2]]
        dup = np.zeros(len(cand), dtype=bool)
        if len(cand):
            flat = cand.reshape(-1, 4)
            for tree in trees:
                dd, _ = tree.query(flat, distance_upper_bound=1e-7)
                dup |= np.isfinite(dd)
            for i, j in sorted(cKDTree(flat).query_pairs(1e-7)):
                if not dup[i]:
                    dup[j] = True
        new = ~dup
        frontier = cand[new]
        frontier_words = [w for w, n in zip(cand_words, new) if n]
        if len(frontier):
            trees.append(cKDTree(_element_keys(frontier)))
            all_mats.append(frontier)
            all_words.extend(frontier_words)
        inside = int(np.sum(dist[new] <= t_max))
        quiet = quiet + 1 if inside == 0 else 0
        total += len(frontier)
        logger.debug('orbit depth %d: %d new elements (%d inside), total %d',
                     depth, len(frontier), inside, total)
        if total > max_elements:
            raise DomainError('orbit enumeration exceeds %d elements; '
                              'lower t_max' % max_elements)

    mats = np.concatenate(all_mats)
    coords = _hyperboloid(mats)
    dists = np.arccosh(np.maximum(coords[:, 0], 1.0))
    nonzero = dists[dists > 1e-6]
    separation = float(nonzero.min()) if len(nonzero) else 0.0
    order = np.lexsort((np.arange(len(dists)), dists))
    order = order[dists[order] <= t_max]
    kept = order[_merge_points(coords[order], separation / 2)]
    logger.info('orbit cache %s up to %.3g: %d points, word depth %d',
                preset.name, t_max, len(kept), depth)
    return OrbitCache(preset.name, t_max, tolerance,
                      [all_words[i] for i in kept], mats[kept],
                      dists[kept], separation)


class PlaneModel(SpaceModel):
    """Disk model with a cocompact Fuchsian group; basepoint at the origin."""
    eta = 1.0

    def __init__(self, preset: str = 'genus2-octagon', delta: float = math.log(2),
                 algebraic_tol: float = 1e-9, geometric_tol: float = 1e-6,
                 cache: OrbitCache | None = None) -> None:
        self.group = build_group(preset)
        self.name = 'plane:' + self.group.name
        self.delta = delta
        self.radius = self.group.radius
        self.algebraic_tol = algebraic_tol
        self.geometric_tol = geometric_tol
        self.cache = cache

    @property
    def basepoint(self) -> complex:
        return 0j

    def is_boundary(self, x) -> bool:
        return isinstance(x, CirclePoint)

    def contains_point(self, x) -> bool:
        return isinstance(x, (complex, float, int)) and abs(x) < 1

    def _check(self, x) -> complex:
        x = complex(x)
        if abs(x) >= 1:
            raise DomainError('%r is not inside the unit disk' % (x,))
        return x

    def distance(self, x, y) -> float:
        return disk_distance(self._check(x), self._check(y))

    def busemann(self, b: CirclePoint, x, y) -> float:
        return busemann_disk(b, x, y)

    def gromov(self, x, y, base) -> float:
        base = self._check(base)
        bx, by = self.is_boundary(x), self.is_boundary(y)
        if bx and by:
            if x == y:
                raise InfiniteProductError(x)
            half = abs(x.angle - y.angle) / 2
            at_origin = -math.log(abs(math.sin(half)))
            return at_origin + 0.5 * (busemann_disk(x, 0j, base)
                                      + busemann_disk(y, 0j, base))
        if bx or by:
            b, q = (x, y) if bx else (y, x)
            return 0.5 * (self.distance(base, q) - busemann_disk(b, base, q))
        return 0.5 * (self.distance(x, base) + self.distance(y, base)
                      - self.distance(x, y))

    def direction(self, q) -> CirclePoint:
        if self.is_boundary(q):
            return q
        q = self._check(q)
        if abs(q) == 0:
            raise DomainError('the basepoint has no direction')
        return CirclePoint.canonical(math.atan2(q.imag, q.real))

    def along(self, q, s: float) -> complex:
        z = self.direction(q)
        return math.tanh(s / 2) * complex(math.cos(z.angle), math.sin(z.angle))

    def ball_measure(self, center, radius: float, closed: bool = False) -> float:
        if radius >= 1:
            return 1.0
        return 2 * math.asin(radius) / math.pi

    def random_points(self, rng, n, max_norm):
        r = np.tanh(rng.uniform(0, max_norm, n) / 2)
        th = rng.uniform(0, TWO_PI, n)
        return list(r * np.exp(1j * th))

    def random_boundary(self, rng, n):
        return [CirclePoint.canonical(a) for a in rng.uniform(0, TWO_PI, n)]

    def points_near(self, q, radius, rng, n):
        q = self._check(q)
        out = [q]
        g = _disk_transport(q)
        for _ in range(n):
            s = radius * math.sqrt(rng.random())
            th = rng.uniform(0, TWO_PI)
            u = math.tanh(s / 2) * complex(math.cos(th), math.sin(th))
            out.append(g(u))
        return out

    def boundary_near(self, b, radius, rng, n):
        w = math.pi if radius >= 1 else 2 * math.asin(radius)
        offsets = rng.uniform(-w, w, n)
        return [b] + [CirclePoint.canonical(b.angle + o) for o in offsets]

    # -- orbit access -------------------------------------------------------

    def require_cache(self, t_needed: float) -> OrbitCache:
        if self.cache is None:
            raise CacheExhaustedError(t_needed, 0.0)
        if self.cache.t_max < t_needed:
            raise CacheExhaustedError(t_needed, self.cache.t_max)
        return self.cache

    def enumerate_annulus_numeric(self, t: float, R: float | None = None):
        R = self.radius if R is None else R
        if t <= R:
            raise DomainError('annulus needs t > R = %.6g' % R)
        cache = self.require_cache(t + R)
        return cache.window(t - R, t + R)


def disk_distance(x: complex, y: complex) -> float:
    ratio = abs(x - y) / abs(1 - x.conjugate() * y)
    return 2 * math.atanh(min(ratio, 1 - 2 ** -53))


def _disk_transport(q: complex) -> Callable[[complex], complex]:
    """The disk isometry u -> (u + q)/(1 + conj(q) u) taking 0 to q."""
    def move(u: complex) -> complex:
        return (u + q) / (1 + q.conjugate() * u)
    return move


def busemann_disk(b: CirclePoint, x, y) -> float:
    """beta_b(x, y) via the Poisson kernel: log P(x, b) - log P(y, b)."""
    x, y = complex(x), complex(y)
    if abs(x) >= 1 or abs(y) >= 1:
        raise DomainError('Busemann cocycle needs points inside the disk')
    w = complex(math.cos(b.angle), math.sin(b.angle))

    def log_poisson(z: complex) -> float:
        r = abs(z)
        return math.log((1 - r) * (1 + r)) - 2 * math.log(abs(w - z))
    return log_poisson(x) - log_poisson(y)


def busemann_by_rays(b: CirclePoint, x, y, far: float = 30.0) -> float:
    """Finite-ray approximation d(y, z) - d(x, z) with z far toward b."""
    r = math.tanh(far / 2)
    z = r * complex(math.cos(b.angle), math.sin(b.angle))
    return disk_distance(complex(y), z) - disk_distance(complex(x), z)


def mc_boundary_integral(f: Callable[[np.ndarray], np.ndarray], n_samples: int,
                         seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of int_B f dnu_p with its standard error.

    ``f`` takes an array of angles. Summation is numpy's pairwise sum over a
    single array, independent of how callers split work.
    """
    if n_samples < 1:
        raise DomainError('need at least one sample')
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0, TWO_PI, n_samples)
    values = np.asarray(f(angles), dtype=float)
    if values.shape == ():
        values = np.full(n_samples, float(values))
    mean = float(np.sum(values) / n_samples)
    if n_samples == 1:
        return mean, 0.0
    var = float(np.sum((values - mean) ** 2) / (n_samples - 1))
    return mean, math.sqrt(var / n_samples)


def lambda_plane(q: complex, angles: np.ndarray) -> np.ndarray:
    """lambda^q(b) = exp(-beta_b(p, q)/2) = P(q, b)^(1/2) for eta = 1."""
    w = np.exp(1j * np.asarray(angles))
    r = abs(q)
    return np.sqrt((1 - r * r) / np.abs(w - q) ** 2)


class ArcSet:
    """A finite union of half-open arcs [start, end) of the circle."""

    def __init__(self, arcs: Sequence[tuple[float, float]] = ()) -> None:
        self.arcs = _normalize_arcs(arcs)

    @classmethod
    def whole(cls) -> ArcSet:
        return cls([(0.0, TWO_PI)])

    @classmethod
    def from_turns(cls, intervals: Sequence[tuple[float, float]]) -> ArcSet:
        return cls([(TWO_PI * a, TWO_PI * b) for a, b in intervals])

    def is_empty(self) -> bool:
        return not self.arcs

    def contains_angle(self, angle: float) -> bool:
        a = CirclePoint.canonical(angle).angle
        return any(s <= a < e for s, e in self.arcs)

    def contains(self, b: CirclePoint) -> bool:
        return self.contains_angle(b.angle)

    __contains__ = contains

    def mask(self, angles: np.ndarray) -> np.ndarray:
        angles = np.mod(np.asarray(angles, dtype=float), TWO_PI)
        out = np.zeros(angles.shape, dtype=bool)
        for s, e in self.arcs:
            out |= (angles >= s) & (angles < e)
        return out

    def measure(self) -> float:
        return sum(e - s for s, e in self.arcs) / TWO_PI

    def complement(self) -> ArcSet:
        if not self.arcs:
            return ArcSet.whole()
        gaps = []
        prev = 0.0
        for s, e in self.arcs:
            if s > prev:
                gaps.append((prev, s))
            prev = e
        if prev < TWO_PI:
            gaps.append((prev, TWO_PI))
        return ArcSet(gaps)

    def __and__(self, other: ArcSet) -> ArcSet:
        out = []
        for s1, e1 in self.arcs:
            for s2, e2 in other.arcs:
                s, e = max(s1, s2), min(e1, e2)
                if s < e:
                    out.append((s, e))
        return ArcSet(out)

    def __or__(self, other: ArcSet) -> ArcSet:
        return ArcSet(list(self.arcs) + list(other.arcs))

    def thicken(self, a: float) -> ArcSet:
        """Points whose visual distance sin(|angle|/2) to the set is < e^-a."""
        r = math.exp(-a)
        if r >= 1:
            return ArcSet.whole()
        w = 2 * math.asin(r)
        return ArcSet([(s - w, e + w) for s, e in self.arcs])

    def distance_to(self, b: CirclePoint) -> float:
        if self.contains(b):
            return 0.0
        best = math.pi
        for s, e in self.arcs:
            for end in (s, e):
                diff = abs(b.angle - end) % TWO_PI
                best = min(best, min(diff, TWO_PI - diff))
        return math.sin(best / 2)

    def __repr__(self) -> str:
        return 'ArcSet(%s)' % ', '.join('[%.6g, %.6g)' % a for a in self.arcs)


def _normalize_arcs(arcs) -> tuple:
    pieces = []
    for s, e in arcs:
        if e - s >= TWO_PI:
            return ((0.0, TWO_PI),)
        if e <= s:
            continue
        s0 = math.fmod(s, TWO_PI)
        if s0 < 0:
            s0 += TWO_PI
        e0 = s0 + (e - s)
        if e0 > TWO_PI:
            pieces.append((s0, TWO_PI))
            pieces.append((0.0, e0 - TWO_PI))
        else:
            pieces.append((s0, e0))
    pieces.sort()
    merged: list[list[float]] = []
    for s, e in pieces:
        if merged and s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    return tuple((s, e) for s, e in merged)
