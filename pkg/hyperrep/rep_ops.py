"""Boundary representations: lambda functions, rho_p, T_t and their limits.

Tree computations are exact in Q(sqrt(2k-1)). The central routine is
:func:`coefficient_leaves`, a depth-first walk over prefixes of b that stops as
soon as lambda^gamma(b), the cell of b and the cell of gamma^-1 b are all
determined; matrix coefficients, compressed operators and the convergence
experiment are sums over its leaves.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy import integrate, special, stats

from . import words as W
from .core import SpaceModel, chopped_product
from .errors import CertificationError, DomainError, ResolutionBudgetError
from .parallel import exact_sum, partitioned_map
from .plane import (TWO_PI, ArcSet, MobiusIsometry, PlaneModel,
                    lambda_plane, mc_boundary_integral)
from .scalar import ExactScalar
from .tree import CylinderSet, TreeBoundaryPoint, TreeModel
from .words import ReducedWord, Word

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 16


def _letters(g) -> Word:
    if isinstance(g, ReducedWord):
        return g.letters
    return tuple(g)


def _zero(model: TreeModel) -> ExactScalar:
    return ExactScalar(0, 0, model.m)


# -- simple functions -------------------------------------------------------

class CylinderFunction:
    """A function on the tree boundary constant on depth-``depth`` cylinders."""

    def __init__(self, model: TreeModel, depth: int, values: dict) -> None:
        self.model = model
        self.depth = depth
        self.values = {}
        for cell, v in values.items():
            cell = tuple(cell)
            if len(cell) != depth:
                raise DomainError('cell %r is not at depth %d' % (cell, depth))
            v = v if isinstance(v, ExactScalar) else ExactScalar(v, 0, model.m)
            if v:
                self.values[cell] = v

    @classmethod
    def constant(cls, model: TreeModel, c=1) -> CylinderFunction:
        return cls(model, 0, {(): c})

    @classmethod
    def indicator(cls, S: CylinderSet) -> CylinderFunction:
        return cls(S.model, S.depth, {c: 1 for c in S.cells})

    def value_of(self, prefix: Word) -> ExactScalar:
        return self.values.get(tuple(prefix[:self.depth]), _zero(self.model))

    def __call__(self, b: TreeBoundaryPoint) -> ExactScalar:
        return self.value_of(b.prefix(self.depth))

    def refine(self, depth: int) -> CylinderFunction:
        if depth < self.depth:
            raise DomainError('cannot refine to a coarser depth')
        if depth == self.depth:
            return self
        out = {}
        for cell, v in self.values.items():
            for w in CylinderSet(self.model, self.depth, [cell]).refine(depth).cells:
                out[w] = v
        return CylinderFunction(self.model, depth, out)

    def _aligned(self, other: CylinderFunction):
        d = max(self.depth, other.depth)
        return self.refine(d), other.refine(d)

    def inner(self, other: CylinderFunction) -> ExactScalar:
        """<u, v>_p; values are real so no conjugation is needed."""
        a, b = self._aligned(other)
        total = _zero(self.model)
        for cell, v in a.values.items():
            w = b.values.get(cell)
            if w is not None:
                total = total + v * w
        return total * self.model.depth_measure(a.depth)

    def norm2(self) -> ExactScalar:
        return self.inner(self)

    def __add__(self, other: CylinderFunction) -> CylinderFunction:
        a, b = self._aligned(other)
        out = dict(a.values)
        for cell, v in b.values.items():
            out[cell] = out.get(cell, _zero(self.model)) + v
        return CylinderFunction(self.model, a.depth, out)

    def __mul__(self, c) -> CylinderFunction:
        return CylinderFunction(self.model, self.depth,
                                {k: v * c for k, v in self.values.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, CylinderFunction):
            return NotImplemented
        a, b = self._aligned(other)
        return a.values == b.values

    def __repr__(self) -> str:
        return 'CylinderFunction(depth=%d, %d cells)' % (self.depth,
                                                         len(self.values))


class ArcFunction:
    """A function on the circle constant on finitely many half-open arcs."""

    def __init__(self, pieces: Sequence[tuple[ArcSet, float]]) -> None:
        self.pieces = [(arcs, float(v)) for arcs, v in pieces]

    @classmethod
    def constant(cls, c: float = 1.0) -> ArcFunction:
        return cls([(ArcSet.whole(), c)])

    @classmethod
    def indicator(cls, arcs: ArcSet) -> ArcFunction:
        return cls([(arcs, 1.0)])

    def __call__(self, angles) -> np.ndarray:
        angles = np.asarray(angles, dtype=float)
        out = np.zeros(angles.shape)
        for arcs, v in self.pieces:
            out += v * arcs.mask(angles)
        return out

    def breakpoints(self) -> list[float]:
        return sorted({e for arcs, _ in self.pieces for arc in arcs.arcs
                       for e in arc})


# -- lambda functions -------------------------------------------------------

def lambda_eval(model: SpaceModel, q, b, chopped: bool = False):
    """lambda^q(b) = exp(-eta beta_b(p, q) / 2), or its chopped variant."""
    if isinstance(model, TreeModel):
        # chopped and plain products coincide on a tree
        return model.lambda_exact(q, b)
    norm = model.norm(q)
    if norm == 0:
        return 1.0
    if chopped:
        beta = norm - 2 * chopped_product(model, q, b)
    else:
        beta = model.busemann(b, model.basepoint, q)
    return math.exp(-0.5 * model.eta * beta)


def lambda_l1_closed_form(model: TreeModel, n: int) -> ExactScalar:
    """m^(-n/2) (2m + (n-1)(m-1)) / 2k for |q| = n >= 1."""
    if n == 0:
        return ExactScalar(1, 0, model.m)
    m = model.m
    return (ExactScalar.half_power(m, -n)
            * Fraction(2 * m + (n - 1) * (m - 1), 2 * model.rank))


def lambda_shell_sum(model: TreeModel, n: int) -> ExactScalar:
    """||lambda^q||_1 summed over match classes j of the shells around q."""
    m = model.m
    total = _zero(model)
    for j in range(n + 1):
        if j == n:
            shell = model.depth_measure(n)
        else:
            shell = model.depth_measure(j) - model.depth_measure(j + 1)
        total = total + shell * ExactScalar.half_power(m, 2 * j - n)
    return total


def plane_lambda_l1(distance):
    """||lambda^q||_1 on the disk: (2/pi) e^(-d/2) K(1 - e^(-2d))."""
    d = np.asarray(distance, dtype=float)
    return 2 / math.pi * np.exp(-d / 2) * special.ellipkm1(np.exp(-2 * d))


def lambda_l1(model: SpaceModel, q):
    """<lambda^q, 1>_p."""
    if isinstance(model, TreeModel):
        return lambda_shell_sum(model, len(model._vertex(q)))
    return float(plane_lambda_l1(model.norm(q)))


def lambda_l1_estimate(model: PlaneModel, q, n_samples: int = 100_000,
                       seed: int = 0) -> tuple[float, float]:
    return mc_boundary_integral(lambda a: lambda_plane(complex(q), a),
                                n_samples, seed)


def lambda_l1_quad(model: PlaneModel, q) -> float:
    """Adaptive quadrature of lambda^q over the circle, split at its peak."""
    q = complex(q)
    peak = math.atan2(q.imag, q.real)

    def f(a):
        return float(lambda_plane(q, np.array([a]))[0]) / TWO_PI
    value = 0.0
    for lo, hi in ((peak - math.pi, peak), (peak, peak + math.pi)):
        part, _ = integrate.quad(f, lo, hi, limit=400, epsabs=1e-13)
        value += part
    return value


def lambda_estimation_window(model: SpaceModel, lengths: Sequence[float]):
    """Range of ||lambda^q||_1 / (|q| e^(-eta |q| / 2)) over the lengths."""
    ratios = []
    for n in lengths:
        if isinstance(model, TreeModel):
            l1 = float(lambda_shell_sum(model, int(n)))
            norm = int(n) * float(model.edge)
        else:
            l1 = float(plane_lambda_l1(n))
            norm = float(n)
        ratios.append(l1 / (norm * math.exp(-0.5 * model.eta * norm)))
    return min(ratios), max(ratios)


def l1_ratio_window(model: TreeModel, gap: int, lengths: Sequence[int]):
    """Range of ||lambda^q||_1 / ||lambda^q'||_1 for |q'| = |q| + gap."""
    ratios = [float(lambda_shell_sum(model, n) / lambda_shell_sum(model, n + gap))
              for n in lengths]
    return min(ratios), max(ratios)


def lambda_constant(model: SpaceModel) -> float:
    """Lower constant C with ||lambda^q||_1 >= C |q| e^(-eta|q|/2)."""
    if isinstance(model, TreeModel):
        return (model.m - 1) / (2 * model.rank)
    return 2 / math.pi


# -- rho_p on the tree ------------------------------------------------------

def _check_budget(required: int, budget: int, extra: int) -> None:
    if required > budget:
        raise ResolutionBudgetError(required, budget,
                                    max_feasible=max(budget - extra, 0))


def coefficient_leaves(model: TreeModel, gamma: Word, n_g: int,
                       n_h: int) -> Iterator[tuple[Word, Word, ExactScalar]]:
    """Yield (b-cell, gamma^-1 b-cell, lambda * nu) over a partition of B.

    The cells have depths ``n_h`` and ``n_g``; the weights sum to
    <rho(gamma) 1, 1>.
    """
    g = tuple(gamma)
    G = len(g)
    inv = W.inverse(g)
    m = model.m
    stack: list[Word] = [()]
    while stack:
        P = stack.pop()
        ell = len(P)
        j = W.common_prefix(P, g)
        diverged = j < ell and j < G
        leaf = False
        if diverged:
            moved = inv[:G - j] + P[j:]
            leaf = len(moved) >= n_g and ell >= n_h
        elif ell >= G:
            moved = P[G:]
            leaf = len(moved) >= n_g and ell >= n_h
        if leaf:
            weight = ExactScalar.half_power(m, 2 * j - G) * model.depth_measure(ell)
            yield P[:n_h], moved[:n_g], weight
            continue
        for a in reversed(model.letters):
            if not P or a != -P[-1]:
                stack.append(P + (a,))


def matrix_coefficient(model: TreeModel, gamma, g: CylinderFunction,
                       h: CylinderFunction,
                       budget: int = DEFAULT_BUDGET) -> ExactScalar:
    """<rho_p(gamma) g, h>_p, streamed over boundary prefixes."""
    gamma = _letters(gamma)
    _check_budget(max(len(gamma) + g.depth, h.depth), budget, g.depth)
    total = _zero(model)
    for cell_h, cell_g, w in coefficient_leaves(model, gamma, g.depth, h.depth):
        hv = h.values.get(cell_h)
        if hv is None:
            continue
        gv = g.values.get(cell_g)
        if gv is None:
            continue
        total = total + hv * gv * w
    return total


def apply_rho(model: TreeModel, gamma, v: CylinderFunction,
              budget: int = DEFAULT_BUDGET) -> CylinderFunction:
    """rho_p(gamma) v, exactly, on cylinders of depth |gamma| + depth(v)."""
    gamma = _letters(gamma)
    G = len(gamma)
    N = G + v.depth
    _check_budget(N, budget, v.depth)
    if G == 0:
        return v
    inv = W.inverse(gamma)
    out = {}
    for cell in W.words_of_length(model.rank, N):
        j = W.common_prefix(cell, gamma)
        moved = W.multiply(inv, cell)
        value = v.value_of(moved[:v.depth])
        if value:
            out[cell] = value * ExactScalar.half_power(model.m, 2 * j - G)
    return CylinderFunction(model, N, out)


def rho_unitarity_defect(model: TreeModel, gamma, u: CylinderFunction,
                         v: CylinderFunction) -> ExactScalar:
    """<rho u, rho v> - <u, v>; exactly zero."""
    ru, rv = apply_rho(model, gamma, u), apply_rho(model, gamma, v)
    return ru.inner(rv) - u.inner(v)


def _rn_factor(model: TreeModel, b: TreeBoundaryPoint, x, y) -> ExactScalar:
    """exp(-eta beta_b(x, y) / 2) between vertices."""
    steps = model.busemann(b, x, y) / model.edge
    if steps.denominator != 1:
        raise DomainError('Radon-Nikodym factor needs vertices')
    return ExactScalar.half_power(model.m, -int(steps))


def intertwiner_check(model: TreeModel, q, gammas: Sequence,
                      functions: Sequence[CylinderFunction],
                      points: Sequence[TreeBoundaryPoint]) -> int:
    """rho_q(gamma) M = M rho_p(gamma) with M v = exp(-eta beta_b(q,p)/2) v.

    Checked pointwise and exactly on the given boundary points.
    """
    p = model.basepoint
    q = q if isinstance(q, ReducedWord) else ReducedWord(_letters(q), model.edge)
    checked = 0
    for gamma in gammas:
        gw = ReducedWord(_letters(gamma), model.edge)
        gq = gw * q
        gp = gw
        for v in functions:
            for b in points:
                back = b.translate(W.inverse(gw.letters))
                lhs = (_rn_factor(model, b, q, gq)
                       * _rn_factor(model, back, q, p) * v(back))
                rhs = (_rn_factor(model, b, q, p)
                       * _rn_factor(model, b, p, gp) * v(back))
                if lhs != rhs:
                    raise CertificationError('intertwiner relation fails',
                                             witness=(str(gw), str(b)))
                checked += 1
    return checked


# -- T_t --------------------------------------------------------------------

@dataclass
class GroupAlgebraVector:
    """Finitely supported element sum_gamma c_gamma gamma of the group algebra."""
    model: SpaceModel
    support: list
    coefficients: list
    t: float = 0.0

    def __post_init__(self):
        if len(self.support) != len(self.coefficients):
            raise DomainError('support and coefficients differ in length')

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def total(self):
        if isinstance(self.model, TreeModel):
            return exact_sum(self.coefficients, _zero(self.model))
        return float(np.sum(np.asarray(self.coefficients, dtype=float)))

    def apply(self, v: CylinderFunction) -> CylinderFunction:
        """(rho o T)(v) as a cylinder function (small supports only)."""
        out = None
        for gamma, c in zip(self.support, self.coefficients):
            if not c:
                continue
            term = apply_rho(self.model, gamma, v) * c
            out = term if out is None else out + term
        if out is None:
            return CylinderFunction(self.model, v.depth, {})
        return out

    def pair(self, u: CylinderFunction, w: CylinderFunction) -> ExactScalar:
        """<(rho o T)(u), w>_p."""
        total = _zero(self.model)
        for gamma, c in zip(self.support, self.coefficients):
            if c:
                total = total + c * matrix_coefficient(self.model, gamma, u, w)
        return total


def build_Tt(model: SpaceModel, f, t) -> GroupAlgebraVector:
    """T_t^f = (1/|S_t|) sum_{S_t} f(z^gamma) / <rho(gamma) 1, 1> gamma."""
    if isinstance(model, TreeModel):
        support = model.enumerate_annulus(t)
        size = len(support)
        coeffs = []
        for gamma in support:
            value = f(model.direction(gamma))
            coeffs.append(value / (size * lambda_shell_sum(model, len(gamma))))
        return GroupAlgebraVector(model, support, coeffs, t)
    idx = model.enumerate_annulus_numeric(t)
    cache = model.cache
    values = np.asarray(f(cache.angles[idx]), dtype=float)
    coeffs = values / (len(idx) * plane_lambda_l1(cache.distances[idx]))
    return GroupAlgebraVector(model, [cache.words[i] for i in idx],
                              list(coeffs), t)


def _tree_sup_norm(model: TreeModel, t) -> ExactScalar:
    """(rho o T_t^1)(1) at any boundary point, aggregated by match class.

    For a length-n word the number of gamma sharing exactly j letters with b
    does not depend on b, so one class computation covers every cell.
    """
    lengths = model.annulus_lengths(t)
    size = model.annulus_size(t)
    total = _zero(model)
    k2 = 2 * model.rank
    for n in lengths:
        l1 = lambda_shell_sum(model, n)
        for j in range(n + 1):
            if j == n:
                count = 1
            elif j == 0:
                count = (k2 - 1) * model.m ** (n - 1)
            else:
                count = (k2 - 2) * model.m ** (n - j - 1)
            total = total + count * ExactScalar.half_power(model.m, 2 * j - n) / l1
    return total / size


def tree_sup_norm_direct(model: TreeModel, t,
                         points: Sequence[TreeBoundaryPoint]) -> ExactScalar:
    """The same function summed term by term over S_t at each point."""
    words = model.enumerate_annulus(t)
    size = len(words)
    best = None
    for b in points:
        value = exact_sum((model.lambda_exact(w, b) / lambda_shell_sum(model, len(w))
                           for w in words), _zero(model)) / size
        best = value if best is None or value > best else best
    return best


def sup_norm_Tt1(model: SpaceModel, t, n_angles: int = 512, seed: int = 0):
    """||(rho o T_t^1)(1)||_inf; a sampled lower bound on the plane."""
    if t <= model.radius + 2 * model.delta:
        raise DomainError('need t > R + 2 delta')
    if isinstance(model, TreeModel):
        return _tree_sup_norm(model, t)
    idx = model.enumerate_annulus_numeric(t)
    cache = model.cache
    coords = cache.coords[idx]
    weights = 1 / plane_lambda_l1(cache.distances[idx])
    rng = np.random.default_rng(seed)
    angles = np.sort(rng.uniform(0, TWO_PI, n_angles))
    best = 0.0
    for a in angles:
        kernel = coords[:, 0] - coords[:, 1] * math.cos(a) - coords[:, 2] * math.sin(a)
        value = float(np.sum(weights / np.sqrt(kernel)) / len(idx))
        best = max(best, value)
    return best


# -- tail bounds and limsup -------------------------------------------------

def tail_constant(model: SpaceModel, nu_total: float = 1.0) -> float:
    """C_0 = e^(delta eta) nu(B) e^delta / C."""
    d = model.delta
    return math.exp(d * model.eta) * nu_total * math.exp(d) / lambda_constant(model)


def _tail_ratio(model: SpaceModel, q, V) -> float:
    if isinstance(model, TreeModel):
        path = model._vertex(q)
        num = matrix_coefficient(model, path, CylinderFunction.constant(model),
                                 CylinderFunction.indicator(V),
                                 budget=len(path) + V.depth + 1)
        return float(num / lambda_shell_sum(model, len(path)))
    q = complex(q)
    total = 0.0
    for lo, hi in V.arcs:
        part, _ = integrate.quad(
            lambda a: float(lambda_plane(q, np.array([a]))[0]) / TWO_PI,
            lo, hi, limit=400, points=[math.atan2(q.imag, q.real) % TWO_PI]
            if lo < math.atan2(q.imag, q.real) % TWO_PI < hi else None)
        total += part
    return total / float(plane_lambda_l1(model.norm(q)))


def tail_bound_check(model: SpaceModel, q, V, a: float) -> tuple[float, float]:
    """(lhs, rhs) for <lambda^q, chi_V> / ||lambda^q||_1 <= C_0 e^(eta a) / |q|."""
    if a <= 0:
        raise DomainError('a must be positive')
    norm = model.norm(q)
    if norm == 0:
        raise DomainError('tail bound needs q != p')
    if not V.is_empty() and V.thicken(a).contains(model.direction(q)):
        raise DomainError('direction of q lies in V(a)')
    lhs = 0.0 if V.is_empty() else _tail_ratio(model, q, V)
    rhs = tail_constant(model) * math.exp(model.eta * a) / norm
    if lhs > rhs * (1 + 1e-12):
        raise CertificationError('tail bound fails', witness=(q, lhs, rhs))
    return lhs, rhs


def limsup_bound(model: TreeModel, U: CylinderSet, V: CylinderSet, a: float,
                 t, t0: float, dual: bool = False) -> tuple[float, float]:
    """Finite-t form of the limsup estimate for psi_t = T_t^{chi_U} (or its dual).

    Returns (left, right) with left = sum psi(g) <rho(g)1, chi_V>/<rho(g)1, 1>
    and right = sum psi(g) chi_{V(a)}(z^g) + C_0 e^(eta a)/t0 * sum psi(g).
    """
    if not 0 < t0 <= float(t) - model.radius:
        raise DomainError('need 0 < t0 <= t - R')
    T = build_Tt(model, CylinderFunction.indicator(U), t)
    one = CylinderFunction.constant(model)
    chi_V = CylinderFunction.indicator(V)
    thick = V.thicken(a) if not V.is_empty() else V
    left = _zero(model)
    near = _zero(model)
    for gamma, c in zip(T.support, T.coefficients):
        if not c:
            continue
        g = gamma.inverse() if dual else gamma
        left = left + c * (matrix_coefficient(model, g, one, chi_V)
                           / lambda_shell_sum(model, len(g)))
        if not thick.is_empty() and thick.contains(model.direction(g)):
            near = near + c
    tail = tail_constant(model) * math.exp(model.eta * a) / t0
    right = float(near) + tail * float(T.total())
    if float(left) > right * (1 + 1e-12):
        raise CertificationError('limsup estimate fails at finite t',
                                 witness=(float(left), right))
    return float(left), right


# -- convergence experiment -------------------------------------------------

def _convergence_partition(first: int, model: TreeModel, lengths: Sequence[int],
                           U: CylinderSet, V: CylinderSet, W_: CylinderSet,
                           budget: int) -> dict:
    """Exact partial sums over the annulus words starting with ``first``."""
    chi_V = CylinderFunction.indicator(V)
    chi_W = CylinderFunction.indicator(W_)
    head = max(U.depth, W_.depth) + 1
    tail = V.depth + 1
    memo: dict = {}
    sums = {}
    for n in lengths:
        total = _zero(model)
        for gamma in W.words_of_length(model.rank, n, first):
            key = (gamma[:head], gamma[-tail:], n) if n > head + tail else gamma
            term = memo.get(key)
            if term is None:
                if U.contains_word(gamma):
                    term = matrix_coefficient(model, gamma, chi_V, chi_W, budget)
                else:
                    term = _zero(model)
                memo[key] = term
            if term:
                total = total + term
        sums[n] = total
    return sums


def tt_pairing(model: TreeModel, U: CylinderSet, V: CylinderSet,
               W_: CylinderSet, t, threads: int = 1,
               budget: int = DEFAULT_BUDGET) -> ExactScalar:
    """<(rho o T_t^{chi_U}) chi_V, chi_W>, exact, streamed over S_t."""
    lengths = model.annulus_lengths(t)
    required = max(lengths) + V.depth
    _check_budget(max(required, W_.depth), budget, V.depth)
    parts = partitioned_map(_convergence_partition, list(model.letters), threads,
                            model=model, lengths=lengths, U=U, V=V, W_=W_,
                            budget=budget)
    total = _zero(model)
    for n in lengths:
        shell = exact_sum((p[n] for p in parts), _zero(model))
        total = total + shell / lambda_shell_sum(model, n)
    return total / model.annulus_size(t)


@dataclass
class ConvergenceRow:
    t: float
    s_t_size: int
    value: ExactScalar
    target: ExactScalar
    abs_error: float
    wall_ms: float = 0.0


def convergence_experiment(model: TreeModel, U: CylinderSet, V: CylinderSet,
                           W_: CylinderSet, t_list: Sequence, threads: int = 1,
                           budget: int = DEFAULT_BUDGET,
                           timing: bool = False) -> list[ConvergenceRow]:
    """Series of <(rho o T_t^{chi_U}) chi_V, chi_W> against nu(U n W) nu(V)."""
    t_list = list(t_list)
    if any(b <= a for a, b in zip(t_list, t_list[1:])):
        raise DomainError('t values must increase')
    target = (U & W_).measure() * V.measure()
    rows = []
    for t in t_list:
        start = time.perf_counter()
        value = tt_pairing(model, U, V, W_, t, threads, budget)
        elapsed = (time.perf_counter() - start) * 1000 if timing else 0.0
        rows.append(ConvergenceRow(t, model.annulus_size(t), value, target,
                                   abs(float(value - target)), elapsed))
        logger.info('t=%s value=%.17g target=%.17g', t, float(value),
                    float(target))
    return rows


def error_slope(rows: Sequence[ConvergenceRow], t_min: float = 6) -> float:
    """Least-squares slope of log error against log t for t >= t_min."""
    pts = [(math.log(float(r.t)), math.log(r.abs_error)) for r in rows
           if float(r.t) >= t_min and r.abs_error > 0]
    if len(pts) < 2:
        raise DomainError('need two positive errors to fit a slope')
    xs, ys = zip(*pts)
    return float(stats.linregress(xs, ys).slope)


def certify_convergence(rows: Sequence[ConvergenceRow], t_from: float = 6,
                        final_tol: float = 0.1,
                        slope_range: tuple[float, float] | None = None,
                        min_fit_points: int = 3) -> float | None:
    """Check the decay of a convergence series from ``t_from`` on.

    Errors must not increase and the last one must be below ``final_tol``.
    With at least ``min_fit_points`` positive errors the log-log slope must
    be negative, or inside ``slope_range`` when one is given. Returns the
    slope, or None when too few points were available to fit it.
    """
    late = [r for r in rows if float(r.t) >= t_from]
    if not late:
        return None
    errors = [r.abs_error for r in late]
    for a, b in zip(late, late[1:]):
        if b.abs_error > a.abs_error:
            raise CertificationError('error increases after t=%s' % t_from,
                                     witness=(b.t, a.abs_error, b.abs_error))
    if errors[-1] >= final_tol:
        raise CertificationError('final error not below %g' % final_tol,
                                 witness=(late[-1].t, errors[-1]))
    if sum(1 for e in errors if e > 0) < min_fit_points:
        return None
    slope = error_slope(rows, t_from)
    lo, hi = slope_range if slope_range is not None else (-math.inf, 0.0)
    if not lo <= slope <= hi or slope >= 0:
        raise CertificationError('log-log error slope outside [%g, %g]' % (lo, hi),
                                 witness=slope)
    logger.info('convergence from t=%s: final error %.6g, slope %.4f',
                t_from, errors[-1], slope)
    return slope


def sign_pattern_sum(model: TreeModel, U: CylinderSet, V: CylinderSet,
                     W_: CylinderSet, t, threads: int = 1) -> ExactScalar:
    """Sum over the eight complement patterns; always exactly 1."""
    total = _zero(model)
    for u in (U, U.complement()):
        for v in (V, V.complement()):
            for w in (W_, W_.complement()):
                if u.is_empty() or v.is_empty() or w.is_empty():
                    continue
                total = total + tt_pairing(model, u, v, w, t, threads)
    return total


# -- compressed operators ---------------------------------------------------

@dataclass
class CompressedOperator:
    """P_n rho(gamma) P_n in the basis chi_c / sqrt(nu(c)), c of depth n."""
    model: TreeModel
    depth: int
    gamma: Word
    matrix: np.ndarray = field(repr=False)

    def to_float(self) -> np.ndarray:
        return np.vectorize(float, otypes=[float])(self.matrix)


def cylinder_basis(model: TreeModel, n: int) -> list[Word]:
    return list(W.words_of_length(model.rank, n))


def compress(model: TreeModel, gamma, n: int,
             basis: Sequence[Word] | None = None) -> CompressedOperator:
    """Exact compression; entries <rho(gamma) chi_c, chi_c'> / nu_n."""
    gamma = _letters(gamma)
    basis = cylinder_basis(model, n) if basis is None else list(basis)
    index = {c: i for i, c in enumerate(basis)}
    D = len(basis)
    M = np.empty((D, D), dtype=object)
    for i in range(D):
        for j in range(D):
            M[i, j] = _zero(model)
    scale = model.depth_measure(n)
    for cell_h, cell_g, w in coefficient_leaves(model, gamma, n, n):
        r, c = index[cell_h], index[cell_g]
        M[r, c] = M[r, c] + w / scale
    return CompressedOperator(model, n, gamma, M)


def rank_sweep(model: TreeModel, n: int, max_length: int,
               max_dim: int = 500) -> list[tuple[int, int]]:
    """[(L, rank of span{P_n rho(gamma) P_n : |gamma| <= L})] for L = 0..max_length."""
    D = W.sphere_size(model.rank, n)
    if D > max_dim:
        raise ResolutionBudgetError(D, max_dim)
    basis = cylinder_basis(model, n)
    rows: list[np.ndarray] = []
    out = []
    previous = 0
    for L in range(max_length + 1):
        for gamma in W.words_of_length(model.rank, L):
            rows.append(compress(model, gamma, n, basis).to_float().ravel())
        sv = np.linalg.svd(np.array(rows), compute_uv=False)
        rank = int(np.sum(sv > 1e-9 * sv[0])) if len(sv) else 0
        if rank < previous:
            raise CertificationError('truncation rank decreased', witness=L)
        previous = rank
        out.append((L, rank))
        logger.debug('depth %d, L=%d: rank %d of %d', n, L, rank, D * D)
    return out


def truncation_rank(model: TreeModel, n: int, max_length: int,
                    max_dim: int = 500) -> int:
    return rank_sweep(model, n, max_length, max_dim)[-1][1]


# -- plane counterparts -----------------------------------------------------

def plane_apply_rho(gamma: MobiusIsometry, v: Callable) -> Callable:
    """rho_p(gamma) v as a vectorized function of angles."""
    inv = gamma.inverse()
    q = gamma.act(0j)

    def moved(angles):
        angles = np.atleast_1d(np.asarray(angles, dtype=float))
        back = np.array([inv.act_boundary(a) for a in angles])
        return lambda_plane(q, angles) * v(back)
    return moved


def plane_matrix_coefficient(gamma: MobiusIsometry, g: ArcFunction,
                             h: ArcFunction) -> float:
    """<rho_p(gamma) g, h>_p by adaptive quadrature between breakpoints."""
    f = plane_apply_rho(gamma, g)
    cuts = set(h.breakpoints())
    cuts.update(gamma.act_boundary(a) for a in g.breakpoints())
    q = gamma.act(0j)
    if abs(q) > 0:
        cuts.add(math.atan2(q.imag, q.real) % TWO_PI)
    cuts = sorted({c % TWO_PI for c in cuts} | {0.0, TWO_PI})
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        if hi - lo < 1e-15:
            continue
        part, _ = integrate.quad(
            lambda a: float(f(a)[0] * h(np.array([a]))[0]) / TWO_PI,
            lo, hi, limit=400, epsabs=1e-12)
        total += part
    return total


def plane_unitarity_defect(gamma: MobiusIsometry, u: ArcFunction,
                           v: ArcFunction) -> float:
    """|<rho u, rho v> - <u, v>| by quadrature."""
    ru, rv = plane_apply_rho(gamma, u), plane_apply_rho(gamma, v)
    cuts = set(u.breakpoints()) | set(v.breakpoints())
    cuts.update(gamma.act_boundary(a) for a in list(cuts))
    q = gamma.act(0j)
    if abs(q) > 0:
        cuts.add(math.atan2(q.imag, q.real) % TWO_PI)
    cuts = sorted({c % TWO_PI for c in cuts} | {0.0, TWO_PI})
    lhs = rhs = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        if hi - lo < 1e-15:
            continue
        lhs += integrate.quad(lambda a: float(ru(a)[0] * rv(a)[0]) / TWO_PI,
                              lo, hi, limit=400, epsabs=1e-12)[0]
        rhs += integrate.quad(lambda a: float(u(np.array([a]))[0]
                                              * v(np.array([a]))[0]) / TWO_PI,
                              lo, hi, limit=400, epsabs=1e-12)[0]
    return abs(lhs - rhs)

