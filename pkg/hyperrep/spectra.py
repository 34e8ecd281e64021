"""Marked length spectra and the rescaling direction of length-spectrum rigidity."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import words as W
from .core import SpaceModel
from .errors import CertificationError, DomainError, EllipticElementError
from .plane import MobiusIsometry, PlaneModel, evaluate_word
from .rep_ops import CylinderFunction, matrix_coefficient
from .scalar import ExactScalar
from .tree import TreeModel, canonical_boundary
from .words import ReducedWord

logger = logging.getLogger(__name__)

TRACE_TOL = 1e-12


def _tree_word(model: TreeModel, gamma) -> ReducedWord:
    if isinstance(gamma, str):
        return model.word(gamma)
    if isinstance(gamma, ReducedWord):
        return gamma
    return ReducedWord(tuple(gamma), model.edge)


def _plane_element(model: PlaneModel, gamma) -> MobiusIsometry:
    if isinstance(gamma, MobiusIsometry):
        return gamma
    return evaluate_word(model.group, gamma)


def translation_length(model: SpaceModel, gamma):
    """l(gamma) = lim d(gamma^m p, p) / m; exact on the tree."""
    if isinstance(model, TreeModel):
        w = _tree_word(model, gamma)
        return len(W.cyclic_reduction(w.letters)) * model.edge
    g = _plane_element(model, gamma)
    tr = abs(g.trace)
    if tr < 2 - TRACE_TOL:
        raise EllipticElementError(g.trace)
    if tr <= 2 + TRACE_TOL:
        return 0.0
    return 2 * math.acosh(tr / 2)


def verify_translation_length(model: SpaceModel, gamma, powers: int = 6):
    """Check l(gamma) against d(gamma^m p, p) for m = 1..powers.

    On the tree d(gamma^m p, p) - m l(gamma) is the same for every m >= 1.
    On the plane it lies in [0, 2h], h the distance from p to the axis.
    """
    ell = translation_length(model, gamma)
    if isinstance(model, TreeModel):
        w = _tree_word(model, gamma)
        if not w.letters:
            return ell
        gaps = {model.distance(w ** m, model.basepoint) - m * ell
                for m in range(1, powers + 1)}
        if len(gaps) != 1:
            raise CertificationError('translation length does not match powers',
                                     witness=str(w))
        return ell
    g = _plane_element(model, gamma)
    if ell == 0:
        return ell
    d1 = g.displacement()
    h = math.acosh(max(1.0, math.sinh(d1 / 2) / math.sinh(ell / 2)))
    for m in range(1, powers + 1):
        gap = g.power(m).displacement() - m * ell
        if not -1e-8 <= gap <= 2 * h + 1e-8:
            raise CertificationError('translation length does not match powers',
                                     witness=(m, gap, h))
    return ell


@dataclass
class MarkedLengthTable:
    rows: list[tuple[str, float | Fraction]] = field(default_factory=list)

    @classmethod
    def compute(cls, model: SpaceModel, words: Iterable,
                verify: bool = True) -> MarkedLengthTable:
        table = cls()
        for gamma in words:
            fn = verify_translation_length if verify else translation_length
            table.rows.append((str(gamma), fn(model, gamma)))
        return table

    def __len__(self) -> int:
        return len(self.rows)

    def lengths(self) -> dict:
        return dict(self.rows)

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(['word', 'length'])
        for word, length in self.rows:
            writer.writerow([word, repr(float(length))
                             if not isinstance(length, Fraction) else str(length)])


def class_function_audit(model: TreeModel, rng: np.random.Generator,
                         n_words: int = 1000, max_length: int = 8) -> int:
    """l(d g d^-1) = l(g) and l(g^n) = n l(g) on random words, exactly."""
    checked = 0
    for _ in range(n_words):
        g = ReducedWord(model.random_word(rng, int(rng.integers(1, max_length + 1))),
                        model.edge)
        d = ReducedWord(model.random_word(rng, int(rng.integers(0, max_length + 1))),
                        model.edge)
        n = int(rng.integers(1, 5))
        ell = translation_length(model, g)
        if translation_length(model, d * g * d.inverse()) != ell:
            raise CertificationError('length is not a class function',
                                     witness=(str(g), str(d)))
        if translation_length(model, g ** n) != n * ell:
            raise CertificationError('length is not homogeneous',
                                     witness=(str(g), n))
        checked += 1
    return checked


def coefficient_by_busemann(model: TreeModel, gamma, g: CylinderFunction,
                            h: CylinderFunction) -> ExactScalar:
    """<rho(gamma) g, h> with lambda read off the metric's Busemann function."""
    w = _tree_word(model, gamma)
    N = max(len(w) + g.depth, h.depth, 1)
    inv = W.inverse(w.letters)
    total = ExactScalar(0, 0, model.m)
    for cell in W.words_of_length(model.rank, N):
        hv = h.value_of(cell)
        if not hv:
            continue
        gv = g.value_of(W.multiply(inv, cell)[:g.depth])
        if not gv:
            continue
        b = canonical_boundary(cell, (cell[-1],))
        beta = model.busemann(b, model.basepoint, w)
        exponent = model.eta * float(beta) / math.log(model.m)
        n = round(exponent)
        if abs(exponent - n) > 1e-9:
            raise CertificationError('eta beta is not an integer multiple of '
                                     'log(2k-1)', witness=exponent)
        lam = ExactScalar.half_power(model.m, -n)
        total = total + hv * gv * lam
    return total * model.depth_measure(N)


@dataclass
class RescalingReport:
    scale: Fraction
    words: int
    coefficients: int
    max_length_defect: Fraction
    max_coefficient_defect: float


def rescaling_invariance_check(model: TreeModel, c, words: Sequence,
                               function_pairs: Sequence[tuple]) -> RescalingReport:
    """Rescale the edge length by c and compare spectra and coefficients."""
    c = Fraction(c)
    if c <= 0:
        raise DomainError('scale must be positive')
    scaled = TreeModel(model.rank, model.edge * c, model.depth)
    worst_len = Fraction(0)
    for gamma in words:
        w = _tree_word(model, gamma)
        ws = ReducedWord(w.letters, scaled.edge)
        worst_len = max(worst_len, abs(translation_length(scaled, ws)
                                       - c * translation_length(model, w)))
    worst_coeff = 0.0
    count = 0
    for gamma in words:
        w = _tree_word(model, gamma)
        ws = ReducedWord(w.letters, scaled.edge)
        for g, h in function_pairs:
            gs = CylinderFunction(scaled, g.depth, g.values)
            hs = CylinderFunction(scaled, h.depth, h.values)
            base = coefficient_by_busemann(model, w, g, h)
            other = coefficient_by_busemann(scaled, ws, gs, hs)
            if base != matrix_coefficient(model, w, g, h):
                raise CertificationError('coefficient routes disagree',
                                         witness=str(w))
            worst_coeff = max(worst_coeff, abs(float(base - other)))
            count += 1
    if worst_len != 0 or worst_coeff != 0:
        raise CertificationError('rescaling changed the representation',
                                 witness=(worst_len, worst_coeff))
    logger.info('rescaling by %s: %d lengths, %d coefficients unchanged',
                c, len(words), count)
    return RescalingReport(c, len(words), count, worst_len, worst_coeff)
