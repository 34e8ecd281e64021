import io
import math
from fractions import Fraction

import pytest

from hyperrep import spectra
from hyperrep.errors import CertificationError, DomainError, EllipticElementError
from hyperrep.plane import MobiusIsometry, PlaneModel
from hyperrep.rep_ops import CylinderFunction, matrix_coefficient
from hyperrep.tree import TreeModel


@pytest.mark.parametrize('text,length', [('a', 1), ('ab', 2), ('aBA', 1),
                                         ('abAB', 4), ('aabAA', 1), ('e', 0)])
def test_tree_translation_lengths(tree, text, length):
    assert spectra.translation_length(tree, text) == length
    assert spectra.verify_translation_length(tree, text) == length


def test_lengths_scale_with_the_edge():
    model = TreeModel(2, Fraction(3, 2))
    assert spectra.translation_length(model, 'abAB') == 6


def test_plane_translation_length():
    e = math.e
    g = MobiusIsometry(e, 0.0, 0.0, 1 / e)
    model = PlaneModel('genus2')
    assert spectra.translation_length(model, g) == pytest.approx(2.0, abs=1e-12)
    assert spectra.verify_translation_length(model, g) == pytest.approx(2.0)


def test_plane_generator_length_matches_powers():
    model = PlaneModel('genus2')
    side = 2 * math.acosh(1 + math.sqrt(2))
    assert spectra.verify_translation_length(model, 'a') == pytest.approx(side)
    assert spectra.verify_translation_length(model, 'ab') >= side - 1e-9


def test_elliptic_elements_are_rejected():
    c, s = math.cos(0.5), math.sin(0.5)
    with pytest.raises(EllipticElementError):
        spectra.translation_length(PlaneModel('genus2'), MobiusIsometry(c, -s, s, c))
    with pytest.raises(EllipticElementError):
        spectra.translation_length(PlaneModel('triangle237'), 'c')


def test_marked_length_table(tree):
    table = spectra.MarkedLengthTable.compute(tree, ['ab', 'aBA'])
    assert table.lengths() == {'ab': 2, 'aBA': 1}
    out = io.StringIO()
    table.write_csv(out)
    assert out.getvalue() == 'word,length\nab,2\naBA,1\n'


def test_length_is_a_class_function(tree, rng):
    assert spectra.class_function_audit(tree, rng, n_words=200) == 200


def test_busemann_route_matches_streamed_coefficients(tree, cyl):
    one = CylinderFunction.constant(tree)
    a = CylinderFunction.indicator(cyl('a'))
    b = CylinderFunction.indicator(cyl('b'))
    for text in ('ab', 'aBA', 'b', 'e'):
        w = tree.word(text)
        for g, h in [(one, one), (a, b), (b, a)]:
            assert (spectra.coefficient_by_busemann(tree, w, g, h)
                    == matrix_coefficient(tree, w, g, h))


@pytest.mark.parametrize('c', [2, Fraction(3, 2)])
def test_rescaling_keeps_coefficients(tree, cyl, c):
    one = CylinderFunction.constant(tree)
    pairs = [(one, one), (CylinderFunction.indicator(cyl('a')),
                          CylinderFunction.indicator(cyl('b')))]
    report = spectra.rescaling_invariance_check(tree, c, ['ab', 'aBA', 'abAB', 'b'],
                                                pairs)
    assert report.coefficients == 8
    assert report.max_length_defect == 0
    assert report.max_coefficient_defect == 0
    scaled = TreeModel(2, c)
    unit = CylinderFunction.constant(scaled)
    value = spectra.coefficient_by_busemann(scaled, scaled.word('ab'), unit, unit)
    assert value == Fraction(2, 3)


def test_rescaling_needs_positive_scale(tree):
    with pytest.raises(DomainError):
        spectra.rescaling_invariance_check(tree, 0, ['a'], [])


def test_busemann_route_reads_the_critical_exponent():
    model = TreeModel(2)
    one = CylinderFunction.constant(model)
    w = model.word('ab')
    model.eta = 2 * model.eta
    doubled = spectra.coefficient_by_busemann(model, w, one, one)
    assert doubled != matrix_coefficient(model, w, one, one)
    model.eta = 1.0
    with pytest.raises(CertificationError):
        spectra.coefficient_by_busemann(model, w, one, one)
