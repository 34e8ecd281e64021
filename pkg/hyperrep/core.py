"""Model-independent geometry of a hyperbolic space with a group action.

Everything here is expressed through the oracles of :class:`SpaceModel`;
the concrete models in :mod:`hyperrep.tree` and :mod:`hyperrep.plane` own
coordinates, this module never does.
"""
from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import CertificationError, DomainError

logger = logging.getLogger(__name__)


class SpaceModel(ABC):
    """A proper geodesic delta-hyperbolic space X with a cocompact group action.

    Points and boundary points are opaque model objects. ``eta`` is the
    critical exponent, ``radius`` the quotient radius R with Gamma.X(p,R) = X.
    """

    name: str = 'abstract'
    delta: float = 0.0
    radius: float = 0.5
    eta: float = 1.0
    exact: bool = False

    @property
    @abstractmethod
    def basepoint(self) -> Any: ...

    @abstractmethod
    def is_boundary(self, x) -> bool: ...

    @abstractmethod
    def contains_point(self, x) -> bool: ...

    @abstractmethod
    def distance(self, x, y) -> float: ...

    @abstractmethod
    def gromov(self, x, y, base) -> float:
        """(x|y)_base, with the continuous extension to boundary arguments."""

    @abstractmethod
    def busemann(self, b, x, y) -> float:
        """beta_b(x, y) = lim_{z -> b} d(y, z) - d(x, z)."""

    @abstractmethod
    def direction(self, q):
        """z_p^q, the endpoint of the ray from the basepoint through q."""

    @abstractmethod
    def along(self, q, s: float):
        """The point at distance s from the basepoint on the ray through q."""

    @abstractmethod
    def ball_measure(self, center, radius: float, closed: bool = False):
        """nu_p of the visual ball around ``center``."""

    @abstractmethod
    def random_points(self, rng: np.random.Generator, n: int,
                      max_norm: float) -> list: ...

    @abstractmethod
    def random_boundary(self, rng: np.random.Generator, n: int) -> list: ...

    @abstractmethod
    def points_near(self, q, radius: float, rng: np.random.Generator,
                    n: int) -> list:
        """Points within ``radius`` of q, always including q itself."""

    @abstractmethod
    def boundary_near(self, b, radius: float, rng: np.random.Generator,
                      n: int) -> list:
        """Boundary points c with sigma_p(b, c) <= radius."""

    def norm(self, q) -> float:
        return float(self.distance(self.basepoint, q))

    def boundary_diameter(self) -> float:
        return 1.0

    def validate_base(self, base) -> None:
        if not self.contains_point(base):
            raise DomainError('base %r is not a point of %s' % (base, self.name))


@dataclass(frozen=True)
class BoundaryBall:
    """Visual ball B_p(center, radius) for the metric sigma_p.

    Balls are open (sigma < radius) unless ``closed``; shadows are closed.
    ``whole`` marks B_p(p) = B.
    """
    model: SpaceModel
    center: Any
    radius: float
    closed: bool = False
    whole: bool = False

    def __post_init__(self):
        if not self.whole and self.radius <= 0:
            raise DomainError('ball radius must be positive, got %r'
                              % (self.radius,))

    def contains(self, b) -> bool:
        if self.whole:
            return True
        sigma = visual_distance(self.model, self.center, b)
        if self.closed:
            return sigma <= self.radius
        return sigma < self.radius

    __contains__ = contains

    def measure(self):
        if self.whole:
            return 1
        return self.model.ball_measure(self.center, self.radius,
                                       closed=self.closed)


def gromov_product(model: SpaceModel, x, y, base=None) -> float:
    """(x|y)_base = 1/2 [d(x,base) + d(y,base) - d(x,y)], extended to B."""
    base = model.basepoint if base is None else base
    model.validate_base(base)
    return model.gromov(x, y, base)


def busemann_cocycle(model: SpaceModel, b, x, y) -> float:
    if not model.is_boundary(b):
        raise DomainError('%r is not a boundary point' % (b,))
    return model.busemann(b, x, y)


def visual_distance(model: SpaceModel, b, c, base=None) -> float:
    """sigma_base(b, c) = exp(-(b|c)_base); zero iff b == c."""
    base = model.basepoint if base is None else base
    if b == c:
        return 0.0
    return math.exp(-float(gromov_product(model, b, c, base)))


def shadow(model: SpaceModel, q) -> BoundaryBall:
    """B_p(q) = B_p(z_p^q, exp(-d(p,q))); the whole boundary for q = p."""
    norm = model.norm(q)
    if norm == 0:
        return BoundaryBall(model, None, 1.0, whole=True)
    return BoundaryBall(model, model.direction(q), math.exp(-norm),
                        closed=True)


def chopped_product(model: SpaceModel, q, b, base=None) -> float:
    """min{(z^q|b), |q|}: the Gromov product truncated at |q|."""
    base = model.basepoint if base is None else base
    norm = model.distance(base, q)
    if norm == 0:
        raise DomainError('chopped product needs q != base')
    z = model.direction(q)
    if z == b:
        return norm
    return min(model.gromov(z, b, base), norm)


def thicken(U, a: float):
    """U(a) = {b : sigma(b, U) < exp(-a)}, as a set of the same kind as U."""
    if a <= 0:
        raise DomainError('thickening parameter must be positive')
    if U.is_empty():
        return U
    return U.thicken(a)


def annulus_cone_membership(model: SpaceModel, r, q,
                            window: tuple[float, float] | None = None) -> bool:
    """Is r in Y^q = {z^r in B(q), | |r| - |q'| | <= R}?

    ``window`` overrides the default radial window (|q'| - R, |q'| + R)
    with q' = l_{p,q}(|q| + 2 delta + R).
    """
    norm_q = model.norm(q)
    if norm_q == 0:
        raise DomainError('annulus cone needs q != p')
    if window is None:
        centre = norm_q + 2 * model.delta + model.radius
        window = (centre - model.radius, centre + model.radius)
    t_lo, t_hi = window
    norm_r = model.norm(r)
    if not (t_lo <= norm_r <= t_hi):
        return False
    if norm_r == 0:
        return False
    return shadow(model, q).contains(model.direction(r))


def shadow_comparison_check(model: SpaceModel, q, rng: np.random.Generator,
                            n: int = 200, tol: float = 1e-9) -> dict:
    """Check X(q', R) in Y^q in X(q, 4 delta + 2R) on sampled points."""
    R, delta = model.radius, model.delta
    q_prime = model.along(q, model.norm(q) + 2 * delta + R)
    inner = 0
    for r in model.points_near(q_prime, R, rng, n):
        if model.distance(r, q_prime) < R - tol:
            inner += 1
            if not annulus_cone_membership(model, r, q):
                raise CertificationError('inner ball not inside the cone',
                                         witness=r)
    outer_radius = 4 * delta + 2 * R
    outer = 0
    for r in model.points_near(q, outer_radius + R, rng, n):
        if annulus_cone_membership(model, r, q):
            outer += 1
            if model.distance(q, r) > outer_radius + tol:
                raise CertificationError('cone point outside the outer ball',
                                         witness=r)
    return {'q_prime': q_prime, 'inner_checked': inner,
            'outer_checked': outer}


def hyperbolicity_audit(model: SpaceModel, rng: np.random.Generator,
                        n: int = 10_000, max_norm: float = 8.0,
                        with_boundary: bool = True) -> float:
    """Largest (hyp) defect min((x|w),(y|w)) - (x|y) over random triples."""
    base = model.basepoint
    worst = -math.inf
    pts = model.random_points(rng, 3 * n, max_norm)
    if with_boundary:
        bdy = model.random_boundary(rng, n)
    for i in range(n):
        x, y, w = pts[3 * i], pts[3 * i + 1], pts[3 * i + 2]
        if with_boundary and i % 2:
            x = bdy[i]
        try:
            xy = model.gromov(x, y, base)
            xw = model.gromov(x, w, base)
            yw = model.gromov(y, w, base)
        except DomainError:
            continue
        worst = max(worst, min(xw, yw) - xy)
    logger.debug('hyperbolicity audit on %s: worst defect %.6g',
                 model.name, worst)
    return worst


def certify_hyperbolicity(model: SpaceModel, rng: np.random.Generator,
                          n: int = 10_000, tol: float = 1e-9) -> float:
    worst = hyperbolicity_audit(model, rng, n)
    if worst > model.delta + tol:
        raise CertificationError(
            'hyperbolicity defect %.6g exceeds delta %.6g'
            % (worst, model.delta), witness=worst)
    return worst


def comparison_report(model: SpaceModel, q, b) -> dict:
    """All four parts of the chopped-product comparison at (q, b)."""
    norm = model.norm(q)
    plain = model.gromov(q, b, model.basepoint)
    chopped = chopped_product(model, q, b)
    beta = norm - 2 * plain
    beta_bar = norm - 2 * chopped
    lam = math.exp(-0.5 * model.eta * beta)
    lam_bar = math.exp(-0.5 * model.eta * beta_bar)
    return {
        'product': plain, 'chopped': chopped,
        'beta': beta, 'beta_bar': beta_bar,
        'lambda': lam, 'lambda_bar': lam_bar,
    }


def check_comparison(model: SpaceModel, pairs: Iterable[tuple],
                     tol: float = 1e-9) -> int:
    d, eta = model.delta, model.eta
    checked = 0
    for q, b in pairs:
        rep = comparison_report(model, q, b)
        if abs(rep['chopped'] - rep['product']) > d + tol:
            raise CertificationError('chopped product too far', (q, b))
        if abs(rep['beta_bar'] - rep['beta']) > 2 * d + tol:
            raise CertificationError('chopped cocycle too far', (q, b))
        lo = math.exp(-d * eta) * rep['lambda']
        hi = math.exp(d * eta) * rep['lambda']
        if not (lo * (1 - tol) <= rep['lambda_bar'] <= hi * (1 + tol)):
            raise CertificationError('chopped lambda outside window', (q, b))
        checked += 1
    return checked


def cocycle_residual(model: SpaceModel, samples: Sequence[tuple]) -> float:
    """max |beta(x,y) + beta(y,z) - beta(x,z)| relative to the scale."""
    worst = 0.0
    for b, x, y, z in samples:
        lhs = model.busemann(b, x, y) + model.busemann(b, y, z)
        rhs = model.busemann(b, x, z)
        scale = max(1.0, abs(float(rhs)))
        worst = max(worst, abs(float(lhs - rhs)) / scale)
    return worst
