from fractions import Fraction

import pytest

from hyperrep.errors import DomainError, InfiniteProductError, InsufficientDepthError
from hyperrep.scalar import ExactScalar
from hyperrep.tree import CylinderSet, TreeBoundaryPoint, TreeModel, match_classes


def test_cylinder_measures(tree):
    assert tree.depth_measure(0) == 1
    assert tree.depth_measure(1) == Fraction(1, 4)
    assert tree.depth_measure(3) == Fraction(1, 36)
    assert CylinderSet.whole(tree).measure() == 1


def test_boundary_parse_and_letters(tree):
    b = tree.boundary('ab(ba)')
    assert b.prefix(6) == (1, 2, 1, 2, 1, 2)
    assert str(tree.boundary('aB...')) == 'a(B)'


def test_boundary_product_and_visual_distance(tree):
    b, c = tree.boundary('ab(a)'), tree.boundary('aB(a)')
    assert tree.gromov(b, c, tree.basepoint) == 1
    with pytest.raises(InfiniteProductError):
        b.common_with(b)


def test_finite_heads_report_missing_depth():
    b = TreeBoundaryPoint((1, 2))
    with pytest.raises(InsufficientDepthError):
        b.letter(2)


def test_busemann_and_distance(tree):
    b = tree.boundary('ab(a)')
    p, q = tree.basepoint, tree.word('aB')
    assert tree.distance(p, q) == 2
    # q shares one letter with b
    assert tree.busemann(b, p, q) == 0
    assert tree.busemann(b, p, tree.word('ab')) == -2
    assert tree.busemann(b, q, p) == -tree.busemann(b, p, q)


def test_lambda_and_radon_nikodym(tree):
    b = tree.boundary('ab(a)')
    q = tree.word('ab')
    assert tree.lambda_exact(q, b) == 3
    assert tree.radon_nikodym(q, b) == 9
    assert tree.lambda_exact(tree.word('B'), b) == ExactScalar.half_power(3, -1)


def test_translation_moves_boundary_points(tree):
    b = tree.boundary('ab(a)')
    assert b.translate(tree.word('BA').letters) == tree.boundary('(a)')


def test_annulus(tree):
    assert tree.annulus_lengths(3) == [3]
    assert tree.annulus_size(3) == 36
    assert len(tree.enumerate_annulus(3)) == 36
    with pytest.raises(DomainError):
        tree.annulus_lengths(Fraction(1, 2))


def test_annulus_with_rational_edge():
    model = TreeModel(2, Fraction(3, 2))
    assert model.annulus_lengths(3) == [2]


def test_transfer_counts_match_enumeration(tree):
    assert tree.transfer_matrix_count(None, None, 3) == 36
    assert tree.transfer_matrix_count(2, -1, 3) == 2


def test_cylinder_set_algebra(tree, cyl):
    a, b = cyl('a'), cyl('b')
    assert (a & b).is_empty()
    assert (a | b).measure() == Fraction(1, 2)
    assert a.complement().measure() == Fraction(3, 4)
    assert a.refine(3) == a
    assert (a & cyl('ab')) == cyl('ab')


def test_thickening_drops_letters(tree):
    S = CylinderSet.cylinder(tree, 'abA')
    assert S.thicken(Fraction(3, 2)) == CylinderSet.cylinder(tree, 'ab')
    assert S.thicken(Fraction(1, 2)) == CylinderSet.cylinder(tree, 'a')


def test_match_classes_sum_to_the_sphere(tree):
    for n in range(1, 6):
        for q in [(1,), (1, 2), (1, 2, 2, -1)]:
            counts = match_classes(tree, q, n)
            assert sum(counts.values()) == 4 * 3 ** (n - 1)


def test_rank_one_is_rejected():
    with pytest.raises(DomainError):
        TreeModel(1)
