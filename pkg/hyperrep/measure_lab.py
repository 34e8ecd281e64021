"""Regular metric measure spaces: regularity, shell integrals and sampling.

All routines are generic over :class:`~hyperrep.core.SpaceModel`. On the tree
integrals are exact cylinder-shell sums; on the plane they are Monte Carlo
estimates whose standard errors widen the assertion tolerance to 3 sigma.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np
from scipy import integrate

from . import words as W
from .core import SpaceModel, shadow
from .errors import CertificationError, DomainError
from .plane import (TWO_PI, CirclePoint, PlaneModel, lambda_plane,
                    mc_boundary_integral)
from .rep_ops import lambda_l1
from .scalar import ExactScalar
from .tree import TreeModel, canonical_boundary, match_classes

logger = logging.getLogger(__name__)

SPREAD_LIMIT = 1e6


@dataclass(frozen=True)
class RegularityCertificate:
    eta: float
    k: float
    kprime: float
    samples: str
    worst_ratio_low: float
    worst_ratio_high: float

    def __post_init__(self):
        if not 0 < self.k <= self.kprime:
            raise CertificationError('regularity constants out of order',
                                     witness=(self.k, self.kprime))

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def regularity_constants(model: SpaceModel) -> tuple[Any, Any]:
    """Closed-form (k, k') for the shipped models.

    Tree: nu(B(b, r)) / r^eta ranges over [1/2k, (2k-1)/2k) across each step
    class of radii. Plane: 2 asin(r) / (pi r) ranges over [2/pi, 1].
    """
    if isinstance(model, TreeModel):
        return Fraction(1, 2 * model.rank), Fraction(model.m, 2 * model.rank)
    if isinstance(model, PlaneModel):
        return 2 / math.pi, 1.0
    raise DomainError('no closed-form regularity constants for %s' % model.name)


def _ball_ratio(model: SpaceModel, center, radius: float) -> float:
    return float(model.ball_measure(center, radius)) / radius ** model.eta


def default_radius_grid(model: SpaceModel, depth: int = 10,
                        per_step: int = 4) -> list[float]:
    """Radii in (0, 1]; on the tree each step class is sampled from its left end."""
    if isinstance(model, TreeModel):
        edge = float(model.edge)
        return [math.exp(-(j + i / per_step) * edge)
                for j in range(depth) for i in range(per_step)]
    return list(np.geomspace(1e-4, 1.0, depth * per_step))


def certify_regularity(model: SpaceModel, radius_grid: Sequence[float],
                       center_samples: Sequence,
                       exact_steps: bool | None = None) -> RegularityCertificate:
    """Tightest (k, k') over the sampled balls B(b, r).

    With ``exact_steps`` (the default on exact models) the certificate reports
    the step-class bounds, whose upper end is a limit never attained by a
    single ball; every sampled ratio is checked to lie inside them.
    """
    if not radius_grid or not center_samples:
        raise DomainError('regularity certification needs nonempty grids')
    if exact_steps is None:
        exact_steps = model.exact
    ratios = []
    for b in center_samples:
        for r in radius_grid:
            if not 0 < r <= model.boundary_diameter():
                raise DomainError('radius %r outside (0, diam]' % (r,))
            ratios.append(_ball_ratio(model, b, r))
    low, high = min(ratios), max(ratios)
    if high / low > SPREAD_LIMIT:
        raise CertificationError('ball ratios are unbounded over the grid',
                                 witness=(low, high))
    k, kprime = low, high
    if exact_steps:
        k_exact, kprime_exact = regularity_constants(model)
        if low < float(k_exact) * (1 - 1e-12) or high >= float(kprime_exact):
            raise CertificationError('sampled ratio escapes the step classes',
                                     witness=(low, high))
        k, kprime = float(k_exact), float(kprime_exact)
    cert = RegularityCertificate(
        eta=model.eta, k=k, kprime=kprime,
        samples='%d centres x %d radii on %s' % (len(center_samples),
                                                 len(radius_grid), model.name),
        worst_ratio_low=low, worst_ratio_high=high)
    logger.info('regularity of %s: k=%.6g kprime=%.6g', model.name, k, kprime)
    return cert


def _audit_decreasing(f: Callable, lo: float, hi: float, n: int = 64) -> None:
    grid = np.linspace(lo, hi, n)
    values = [float(f(u)) for u in grid]
    for u, v, w in zip(grid, values, values[1:]):
        if v <= 0:
            raise DomainError('f must be positive; f(%.6g) = %.6g' % (u, v))
        if w > v * (1 + 1e-12):
            raise DomainError('f is not decreasing near u = %.6g' % u)


def _tree_shell_integral(model: TreeModel, f: Callable, s: float, t: float):
    """int_{B(b,t) - B(b,s)} f(sigma^eta) dnu, exact; sigma^eta = m^-j."""
    edge = float(model.edge)
    total = ExactScalar(0, 0, model.m)
    j = 0
    while math.exp(-j * edge) >= s * (1 - 1e-12):
        inside_t = t >= model.boundary_diameter() or math.exp(-j * edge) < t
        if inside_t:
            shell = model.depth_measure(j) - model.depth_measure(j + 1)
            value = f(Fraction(1, model.m ** j))
            if isinstance(value, (int, Fraction, ExactScalar)):
                total = total + shell * value
            else:
                total = float(total) + float(shell) * float(value)
        j += 1
    return total


def _plane_shell_integral(model: PlaneModel, f: Callable, s: float, t: float,
                          n_samples: int, seed: int) -> tuple[float, float]:
    """Shell integral around angle 0 (rotation invariance), with its error."""
    def integrand(angles: np.ndarray) -> np.ndarray:
        delta = np.minimum(angles, TWO_PI - angles)
        sigma = np.sin(delta / 2)
        inside = (sigma >= s) & ((sigma < t) | (t >= 1))
        out = np.zeros_like(angles)
        out[inside] = [float(f(u)) for u in sigma[inside] ** model.eta]
        return out
    return mc_boundary_integral(integrand, n_samples, seed)


def decreasing_integral_bounds(model: SpaceModel, f: Callable, b, s: float,
                               t: float, constants=None, n_samples: int = 200_000,
                               seed: int = 0) -> tuple[float, float, float]:
    """(lower, upper, actual) for the shell integral of f(sigma(b, c)^eta).

    A radius t equal to the diameter means the whole boundary.
    """
    diam = model.boundary_diameter()
    if not 0 < s < t <= diam:
        raise DomainError('need 0 < s < t <= diam, got s=%r t=%r' % (s, t))
    eta = model.eta
    lo_u, hi_u = s ** eta, t ** eta
    _audit_decreasing(f, lo_u, hi_u)
    k, kprime = (regularity_constants(model) if constants is None
                 else constants)
    k, kprime = float(k), float(kprime)
    area, _ = integrate.quad(lambda u: float(f(u)), lo_u, hi_u, limit=200)
    f_s = float(f(lo_u))
    lower = k * area - (kprime - k) * f_s
    upper = kprime * area + (kprime - k) * lo_u * f_s
    slack = 0.0
    if isinstance(model, TreeModel):
        actual = float(_tree_shell_integral(model, f, s, t))
    else:
        actual, err = _plane_shell_integral(model, f, s, t, n_samples, seed)
        slack = 3 * err
    if not (lower - slack <= actual <= upper + slack):
        raise CertificationError('shell integral outside its bounds',
                                 witness=(lower, actual, upper))
    return lower, upper, actual


def int_as_log_bounds(model: SpaceModel, s: float | None = None, q=None,
                      constants=None) -> tuple[float, float, float]:
    """Logarithmic integral bounds on a diameter-one boundary.

    With ``s``: int_{B(b,s)^c} sigma^-eta against [-k log s - (k'-k),
    -k' log s + (k'-k)]. With a point ``q``: the shadow form with |q| in place
    of -log s. Returns (lower, upper, actual).
    """
    if model.boundary_diameter() != 1:
        raise DomainError('the logarithmic bounds need a diameter-one boundary')
    k, kprime = (regularity_constants(model) if constants is None
                 else constants)
    k, kprime = float(k), float(kprime)
    if q is not None:
        if s is not None:
            raise DomainError('pass either s or q, not both')
        length = model.norm(q)
        s = math.exp(-length)
    elif s is None or not 0 < s < 1:
        raise DomainError('need 0 < s < 1')
    else:
        length = -math.log(s)
    lower = k * length - (kprime - k)
    upper = kprime * length + (kprime - k)
    eta = model.eta
    if isinstance(model, TreeModel):
        actual = float(_tree_shell_integral(model, lambda u: 1 / u, s, 1.0))
    else:
        actual, _ = integrate.quad(
            lambda d: math.sin(d / 2) ** -eta / math.pi,
            2 * math.asin(min(s, 1.0)), math.pi, limit=200)
    if not lower <= actual <= upper:
        raise CertificationError('logarithmic integral outside its bounds',
                                 witness=(lower, actual, upper))
    return lower, upper, actual


def shadow_measure_bounds(model: SpaceModel, points: Sequence) -> dict:
    """nu_q(B(q)) for each q and their infimum (positive on both models)."""
    values = []
    for q in points:
        if isinstance(model, TreeModel):
            n = len(model._vertex(q))
            v = model.depth_measure(n) * ExactScalar(Fraction(model.m) ** n,
                                                     0, model.m)
            values.append(float(v))
        elif isinstance(model, PlaneModel):
            ball = shadow(model, q)
            if ball.whole:
                values.append(1.0)
                continue
            w = 2 * math.asin(min(ball.radius, 1.0))
            c = ball.center.angle
            value, _ = integrate.quad(
                lambda a: float(lambda_plane(q, np.array([a]))[0] ** 2)
                / TWO_PI, c - w, c + w, limit=200)
            values.append(value)
        else:
            raise DomainError('unsupported model %s' % model.name)
    inf = min(values)
    if inf <= 0:
        raise CertificationError('shadow measure vanishes', witness=inf)
    return {'values': values, 'infimum': inf}


@dataclass
class SamplingSet:
    model: SpaceModel
    t: float
    elements: list
    directions: list
    radius: float
    multiplicity: int
    checked: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.elements)


def _multiplicity_bound(model: SpaceModel) -> int:
    reach = 3 * model.radius + 4 * model.delta
    if isinstance(model, TreeModel):
        return model.ball_size(Fraction(str(reach)), strict=True)
    cache = model.require_cache(reach)
    return int(np.sum(cache.distances < reach))


def build_sampling_set(model: SpaceModel, t: float,
                       rng: np.random.Generator | None = None,
                       n_check: int = 2000) -> SamplingSet:
    """S_t with directions gamma -> z_p^{gamma p}, an e^{-t+R+2delta} sampling set."""
    R, delta = model.radius, model.delta
    if t <= R + 2 * delta:
        raise DomainError('sampling sets need t > R + 2 delta = %.6g'
                          % (R + 2 * delta))
    radius = math.exp(-t + R + 2 * delta)
    if isinstance(model, TreeModel):
        elements = model.enumerate_annulus(t)
        directions = [model.direction(w) for w in elements]
    elif isinstance(model, PlaneModel):
        idx = model.enumerate_annulus_numeric(t)
        cache = model.cache
        elements = [cache.words[i] for i in idx]
        directions = [CirclePoint(float(a)) for a in cache.angles[idx]]
    else:
        raise DomainError('unsupported model %s' % model.name)
    S = SamplingSet(model, t, elements, directions, radius,
                    _multiplicity_bound(model))
    rng = np.random.default_rng(0) if rng is None else rng
    S.checked = verify_sampling_set(S, _check_points(model, S, rng, n_check))
    return S


def _check_points(model: SpaceModel, S: SamplingSet,
                  rng: np.random.Generator, n: int) -> list:
    pts = list(model.random_boundary(rng, n))
    if isinstance(model, TreeModel):
        depth = max(len(w) for w in S.elements) + 1
        if W.sphere_size(model.rank, depth) <= 50_000:
            pts += [canonical_boundary(w[:-1], (w[-1],))
                    for w in W.words_of_length(model.rank, depth)]
    return pts


def _sigma_many(model: SpaceModel, b, directions: list) -> np.ndarray:
    if isinstance(model, PlaneModel):
        ang = np.array([d.angle for d in directions])
        diff = np.abs(ang - b.angle) % TWO_PI
        return np.sin(np.minimum(diff, TWO_PI - diff) / 2)
    edge = float(model.edge)
    return np.array([0.0 if d == b else math.exp(-d.common_with(b) * edge)
                     for d in directions])


def verify_sampling_set(S: SamplingSet, points: Sequence) -> dict:
    """Covering and multiplicity on boundary samples."""
    low, high = math.inf, 0
    for b in points:
        count = int(np.sum(_sigma_many(S.model, b, S.directions) < S.radius))
        if count == 0:
            raise CertificationError('sampling balls miss a boundary point',
                                     witness=b)
        if count > S.multiplicity:
            raise CertificationError('sampling multiplicity exceeded',
                                     witness=(b, count))
        low, high = min(low, count), max(high, count)
    return {'points': len(points), 'min_count': low, 'max_count': high}


def audit_almost_continuity(model: SpaceModel, f: Callable, S: SamplingSet,
                            L: float, rng: np.random.Generator,
                            per_point: int = 4) -> float:
    """Largest |log f(x) - log f(y)| over sampled pairs with sigma(x,y) <= r."""
    worst = 0.0
    for d in S.directions:
        near = model.boundary_near(d, S.radius, rng, per_point)
        base = math.log(float(f(d)))
        for c in near[1:]:
            gap = abs(math.log(float(f(c))) - base)
            if gap > L + 1e-12:
                raise DomainError('log f is not (%.6g, %.6g)-almost continuous '
                                  'at %s, %s' % (S.radius, L, d, c))
            worst = max(worst, gap)
    return worst


def sampled_integral(f: Callable, S: SamplingSet, L: float, integral=None,
                     constants=None, rng: np.random.Generator | None = None,
                     audit: bool = True):
    """(estimate, C_L) with C_L = m (L e^L + 1) k'/k.

    When ``integral`` is given the sandwich C_L^-1 estimate <= integral <=
    C_L estimate is asserted.
    """
    model = S.model
    if not len(S):
        raise DomainError('empty sampling set')
    if audit:
        rng = np.random.default_rng(0) if rng is None else rng
        audit_almost_continuity(model, f, S, L, rng)
    k, kprime = (regularity_constants(model) if constants is None
                 else constants)
    C_L = S.multiplicity * (L * math.exp(L) + 1) * float(kprime) / float(k)
    values = [f(d) for d in S.directions]
    if model.exact:
        estimate = sum(values[1:], values[0]) / len(values)
    else:
        estimate = float(np.sum(np.asarray(values, dtype=float)) / len(values))
    if integral is not None:
        est, val = float(estimate), float(integral)
        if not (est / C_L <= val * (1 + 1e-12) and val <= C_L * est * (1 + 1e-12)):
            raise CertificationError('sampling sandwich fails',
                                     witness=(est, val, C_L))
    return estimate, C_L


def lambda_average_check(model: TreeModel, q, t: float) -> tuple:
    """Average of lambda^q over the directions of S_t against C_L ||lambda^q||_1.

    Requires |q| <= t + R. Returns (average, bound) with L = eta (2R + 3 delta).
    """
    path = model._vertex(q)
    R = model.radius_exact
    if len(path) * model.edge > Fraction(str(t)) + R:
        raise DomainError('|q| = %s exceeds t + R' % (len(path) * model.edge))
    L = model.eta * (2 * model.radius + 3 * model.delta)
    k, kprime = regularity_constants(model)
    mult = _multiplicity_bound(model)
    C_L = mult * (L * math.exp(L) + 1) * float(kprime) / float(k)
    total = ExactScalar(0, 0, model.m)
    size = 0
    for n in model.annulus_lengths(t):
        for j, count in match_classes(model, path, n).items():
            total = total + count * ExactScalar.half_power(model.m,
                                                           2 * j - len(path))
            size += count
    average = total / size
    bound = C_L * float(lambda_l1(model, q))
    if float(average) > bound:
        raise CertificationError('sampled lambda average exceeds its bound',
                                 witness=(str(q), t))
    return average, bound
