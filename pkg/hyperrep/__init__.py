"""Boundary representations of hyperbolic groups: exact tree model and the genus-2 plane model."""

from .errors import (CacheExhaustedError, CertificationError, DomainError,
                     EllipticElementError, InfiniteProductError,
                     InsufficientDepthError, ResolutionBudgetError)
from .plane import PlaneModel
from .scalar import ExactScalar
from .tree import CylinderSet, TreeModel

__version__ = '0.1.0'

__all__ = [
    'CacheExhaustedError', 'CertificationError', 'CylinderSet', 'DomainError',
    'EllipticElementError', 'ExactScalar', 'InfiniteProductError',
    'InsufficientDepthError', 'PlaneModel', 'ResolutionBudgetError', 'TreeModel',
]
