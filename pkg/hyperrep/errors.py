"""Exceptions raised by the geometry and representation layers."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class InfiniteProductError(DomainError):
    def __init__(self, point):
        self.point = point

    def __str__(self):
        return ('The Gromov product of a boundary point with itself is '
                'infinite (point %r).' % (self.point,))


class InsufficientDepthError(DomainError):
    def __init__(self, required, available):
        self.required = required
        self.available = available

    def __str__(self):
        return ('Boundary word known to depth %d but depth %d is required.'
                % (self.available, self.required))


class ResolutionBudgetError(DomainError):
    def __init__(self, required, budget, max_feasible=None):
        self.required = required
        self.budget = budget
        self.max_feasible = max_feasible

    def __str__(self):
        msg = 'Resolution %d exceeds the configured budget %d.' % (
            self.required, self.budget)
        if self.max_feasible is not None:
            msg += ' Largest feasible t is %s.' % (self.max_feasible,)
        return msg


class CacheExhaustedError(DomainError):
    def __init__(self, needed, covered):
        self.needed = needed
        self.covered = covered

    def __str__(self):
        return ('Orbit cache covers radius %.6g but %.6g is needed; extend '
                'the cache.' % (self.covered, self.needed))


class EllipticElementError(DomainError):
    def __init__(self, trace):
        self.trace = trace

    def __str__(self):
        return ('The element is elliptic and has zero translation length. '
                'Trace: %r.' % (self.trace,))


class CertificationError(AssertionError):
    """A numerical certificate failed; ``witness`` names the offending input."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness

    def __str__(self):
        base = super().__str__()
        if self.witness is None:
            return base
        return '%s (witness: %r)' % (base, self.witness)
