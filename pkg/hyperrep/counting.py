"""Orbit statistics: annulus counts, growth rates and two-sided equidistribution."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import stats

from . import words as W
from .core import SpaceModel
from .errors import CertificationError, DomainError
from .parallel import partitioned_map
from .plane import ArcSet
from .tree import CylinderSet, TreeModel

logger = logging.getLogger(__name__)


@dataclass
class EquidistributionRow:
    t: float
    s_t_size: int
    freq: float | Fraction
    target: float | Fraction
    abs_error: float


@dataclass
class EquidistributionSeries:
    rows: list[EquidistributionRow] = field(default_factory=list)

    def append(self, row: EquidistributionRow) -> None:
        if not 0 <= row.freq <= 1:
            raise CertificationError('frequency outside [0, 1]', witness=row.t)
        self.rows.append(row)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def max_error(self) -> float:
        return max((r.abs_error for r in self.rows), default=0.0)


def _measure(U) -> Fraction | float:
    if isinstance(U, CylinderSet):
        return U.measure().to_fraction()
    return U.measure()


def _count_partition(first: int, model: TreeModel, lengths: Sequence[int],
                     U: CylinderSet, Uprime: CylinderSet) -> int:
    hits = 0
    for n in lengths:
        for gamma in W.words_of_length(model.rank, n, first):
            if Uprime.contains_word(gamma) and U.contains_word(W.inverse(gamma)):
                hits += 1
    return hits


def tree_equidistribution_count(model: TreeModel, U: CylinderSet,
                                Uprime: CylinderSet, t, threads: int = 1) -> int:
    """#{gamma in S_t : z^{gamma^-1} in U, z^gamma in U'} by enumeration."""
    lengths = model.annulus_lengths(t)
    parts = partitioned_map(_count_partition, list(model.letters), threads,
                            model=model, lengths=lengths, U=U, Uprime=Uprime)
    return sum(parts)


def transfer_count(model: TreeModel, U: CylinderSet, Uprime: CylinderSet,
                   t) -> int:
    """The same count from powers of the transfer matrix (sets of depth <= 1)."""
    if U.depth > 1 or Uprime.depth > 1:
        raise DomainError('transfer-matrix counts need cylinders of depth <= 1')
    U1, V1 = U.refine(1), Uprime.refine(1)
    last = [-c[0] for c in U1.cells]
    first = [c[0] for c in V1.cells]
    total = 0
    for n in model.annulus_lengths(t):
        if n == 0:
            continue
        total += int(model.transfer_matrix_count(first, last, n))
    return total


def equidistribution(model: SpaceModel, U, Uprime, t, threads: int = 1,
                     cross_check: bool = True):
    """(1/|S_t|) #{gamma in S_t : z^{gamma^-1 p} in U and z^{gamma p} in U'}."""
    if isinstance(model, TreeModel):
        hits = tree_equidistribution_count(model, U, Uprime, t, threads)
        size = model.annulus_size(t)
        if cross_check and U.depth <= 1 and Uprime.depth <= 1:
            oracle = transfer_count(model, U, Uprime, t)
            if oracle != hits:
                raise CertificationError('enumeration and transfer counts differ',
                                         witness=(t, hits, oracle))
        return Fraction(hits, size)
    idx = model.enumerate_annulus_numeric(t)
    cache = model.cache
    inside = U.mask(cache.inverse_angles[idx]) & Uprime.mask(cache.angles[idx])
    return float(np.count_nonzero(inside)) / len(idx)


def equidistribution_series(model: SpaceModel, U, Uprime, t_list: Sequence,
                            threads: int = 1) -> EquidistributionSeries:
    target = _measure(U) * _measure(Uprime)
    series = EquidistributionSeries()
    for t in t_list:
        freq = equidistribution(model, U, Uprime, t, threads)
        size = (model.annulus_size(t) if isinstance(model, TreeModel)
                else len(model.enumerate_annulus_numeric(t)))
        series.append(EquidistributionRow(t, size, freq, target,
                                          abs(float(freq) - float(target))))
        logger.info('t=%s freq=%.17g target=%.17g', t, float(freq), float(target))
    return series


def orbit_count(model: SpaceModel, t: float) -> int:
    """N(t) = #{gamma : |gamma|_p <= t}."""
    if isinstance(model, TreeModel):
        return model.ball_size(Fraction(t).limit_denominator(10 ** 9), strict=False)
    return model.require_cache(t).count_within(t)


def growth_exponent(model: SpaceModel, t_values: Sequence[float]) -> tuple[float, float]:
    """Slope of log N(t) against t and the rms residual of the fit."""
    t_values = list(t_values)
    if len(t_values) < 3:
        raise DomainError('growth fit needs at least 3 radii')
    logs = np.array([math.log(orbit_count(model, t)) for t in t_values])
    ts = np.array(t_values, dtype=float)
    fit = stats.linregress(ts, logs)
    residual = float(np.sqrt(np.mean((logs - (fit.intercept + fit.slope * ts)) ** 2)))
    return float(fit.slope), residual


def _window_count(model: SpaceModel, U, Uprime, t: float, a: float) -> int:
    if isinstance(model, TreeModel):
        lengths = [n for n in range(max(0, math.floor((t - a) / float(model.edge))),
                                    math.ceil((t + a) / float(model.edge)) + 1)
                   if t - a < n * float(model.edge) < t + a and n > 0]
        return sum(_count_partition(first, model, lengths, U, Uprime)
                   for first in model.letters)
    idx = model.require_cache(t + a).window(t - a, t + a)
    cache = model.cache
    inside = U.mask(cache.inverse_angles[idx]) & Uprime.mask(cache.angles[idx])
    return int(np.count_nonzero(inside))


@dataclass
class MargulisFit:
    constant: float
    values: list[float]
    residuals: list[float]


def margulis_fit(model: SpaceModel, U, Uprime, a: float,
                 t_list: Sequence[float]) -> MargulisFit:
    """Fit C in e^(-eta t) n(U, U', (t-a, t+a)) ~ C nu(U) nu(U')."""
    if a <= 0:
        raise DomainError('window half-width must be positive')
    mass = float(_measure(U)) * float(_measure(Uprime))
    if mass == 0:
        raise DomainError('empty set: the constant is undefined')
    values = [math.exp(-model.eta * t) * _window_count(model, U, Uprime, t, a) / mass
              for t in t_list]
    constant = float(np.mean(values))
    return MargulisFit(constant, values, [v - constant for v in values])


def check_margulis_agreement(fits: Sequence[MargulisFit],
                             tolerance: float = 0.15) -> float:
    """Largest relative spread of the fitted constants; raises past tolerance."""
    constants = [f.constant for f in fits]
    if not constants or min(constants) <= 0:
        raise DomainError('need positive fitted constants')
    spread = (max(constants) - min(constants)) / min(constants)
    if spread > tolerance:
        raise CertificationError('fitted constants depend on the sets',
                                 witness=constants)
    return spread


def arc_pairs() -> list[tuple[ArcSet, ArcSet]]:
    """Two disjoint quarter-circle pairs used by the default fit."""
    return [(ArcSet.from_turns([(0, 0.25)]), ArcSet.from_turns([(0.5, 0.75)])),
            (ArcSet.from_turns([(0.25, 0.5)]), ArcSet.from_turns([(0.1, 0.35)]))]
