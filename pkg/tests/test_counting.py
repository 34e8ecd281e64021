from fractions import Fraction

import pytest

from hyperrep import counting
from hyperrep.errors import CertificationError, DomainError
from hyperrep.plane import PlaneModel, build_group, build_orbit_cache
from hyperrep.tree import CylinderSet


def test_two_sided_frequencies(tree, cyl):
    U, V = cyl('a'), cyl('b')
    assert counting.equidistribution(tree, U, V, 3) == Fraction(1, 18)
    assert counting.equidistribution(tree, U, V, 4) == Fraction(7, 108)


def test_enumeration_agrees_with_transfer_matrix(tree, cyl):
    sets = [cyl(x) for x in ('a', 'A', 'b', 'B')] + [cyl('a') | cyl('B')]
    for U in sets:
        for V in sets:
            for t in range(1, 7):
                assert (counting.tree_equidistribution_count(tree, U, V, t)
                        == counting.transfer_count(tree, U, V, t))


def test_transfer_counts_need_shallow_sets(tree, cyl):
    with pytest.raises(DomainError):
        counting.transfer_count(tree, cyl('ab'), cyl('a'), 3)


def test_series_approaches_the_product_measure(tree, cyl):
    series = counting.equidistribution_series(tree, cyl('a'), cyl('b'), range(2, 11))
    assert len(series) == 9
    errors = [r.abs_error for r in series]
    assert errors[-1] < errors[0]
    assert errors[-1] < 1e-3
    assert all(r.target == Fraction(1, 16) for r in series)


def test_worker_count_does_not_change_counts(tree, cyl):
    serial = counting.tree_equidistribution_count(tree, cyl('a'), cyl('b'), 6)
    pooled = counting.tree_equidistribution_count(tree, cyl('a'), cyl('b'), 6,
                                                  threads=3)
    assert serial == pooled


def test_orbit_counts_and_growth(tree):
    assert counting.orbit_count(tree, 3) == 53
    slope, residual = counting.growth_exponent(tree, range(4, 11))
    assert slope == pytest.approx(tree.eta, abs=1e-3)
    assert residual < 1e-2
    with pytest.raises(DomainError):
        counting.growth_exponent(tree, [4, 5])


def test_margulis_constants_agree_on_the_tree(tree, cyl):
    fits = [counting.margulis_fit(tree, cyl('a'), cyl('b'), 0.5, [8, 9, 10]),
            counting.margulis_fit(tree, cyl('b') | cyl('B'), cyl('a') | cyl('b'),
                                  0.5, [8, 9, 10])]
    assert counting.check_margulis_agreement(fits) < 0.15


def test_margulis_disagreement_is_reported():
    fits = [counting.MargulisFit(1.0, [], []), counting.MargulisFit(2.0, [], [])]
    with pytest.raises(CertificationError):
        counting.check_margulis_agreement(fits)


def test_margulis_needs_nonempty_sets(tree, cyl):
    empty = cyl('a') & cyl('b')
    with pytest.raises(DomainError):
        counting.margulis_fit(tree, empty, cyl('a'), 0.5, [4])


def test_plane_frequencies_are_probabilities():
    model = PlaneModel('genus2', cache=build_orbit_cache(build_group('genus2'), 8.0))
    U, V = counting.arc_pairs()[0]
    series = counting.equidistribution_series(model, U, V, [5.0])
    assert 0 <= series.rows[0].freq <= 1
    assert series.rows[0].target == pytest.approx(1 / 16)


def test_frequency_outside_unit_interval_is_rejected():
    series = counting.EquidistributionSeries()
    with pytest.raises(CertificationError):
        series.append(counting.EquidistributionRow(1, 1, 2, 0.5, 1.5))


@pytest.mark.parametrize('t', range(1, 7))
def test_frequencies_add_over_complements(tree, cyl, t):
    U = cyl('a')
    whole = CylinderSet.whole(tree)
    for V in (cyl('b'), cyl('aB'), cyl('A') | cyl('bb')):
        split = (counting.equidistribution(tree, U, V, t)
                 + counting.equidistribution(tree, U, V.complement(), t))
        assert split == counting.equidistribution(tree, U, whole, t)


@pytest.mark.slow
def test_plane_growth_exponent_is_one(genus2):
    slope, _ = counting.growth_exponent(genus2, [8, 9, 10, 11, 12])
    assert 0.9 <= slope <= 1.1


@pytest.mark.slow
def test_plane_margulis_constants_agree(genus2):
    fits = [counting.margulis_fit(genus2, U, V, 0.5, [8, 9, 10, 11])
            for U, V in counting.arc_pairs()]
    assert counting.check_margulis_agreement(fits) <= 0.15
