import math
from fractions import Fraction

import pytest

from hyperrep import measure_lab
from hyperrep.errors import CertificationError, DomainError
from hyperrep.plane import CirclePoint, PlaneModel


def test_tree_regularity_constants(tree, rng):
    centres = tree.random_boundary(rng, 16)
    cert = measure_lab.certify_regularity(tree, measure_lab.default_radius_grid(tree),
                                          centres)
    assert (cert.k, cert.kprime) == (0.25, 0.75)
    assert cert.worst_ratio_low == pytest.approx(0.25)
    assert cert.worst_ratio_high < 0.75
    assert '"k": 0.25' in cert.to_json()


def test_plane_regularity_constants(rng):
    model = PlaneModel('genus2')
    cert = measure_lab.certify_regularity(model, measure_lab.default_radius_grid(model),
                                          model.random_boundary(rng, 4))
    assert 2 / math.pi - 1e-12 <= cert.k <= cert.kprime <= 1


def test_radius_outside_diameter_is_rejected(tree, rng):
    with pytest.raises(DomainError):
        measure_lab.certify_regularity(tree, [2.0], tree.random_boundary(rng, 1))


@pytest.mark.parametrize('f', [lambda u: 1 / u, lambda u: u ** -0.5,
                               lambda u: 1 - math.log(u), lambda u: math.exp(-u)])
@pytest.mark.parametrize('s,t', [(0.01, 0.5), (0.001, 1.0), (0.2, 0.3)])
def test_tree_shell_integral_bounds(tree, rng, f, s, t):
    b = tree.random_boundary(rng, 1)[0]
    lower, upper, actual = measure_lab.decreasing_integral_bounds(tree, f, b, s, t)
    assert lower <= actual <= upper


def test_plane_shell_integral_bounds():
    model = PlaneModel('genus2')
    lower, upper, actual = measure_lab.decreasing_integral_bounds(
        model, lambda u: 1 / u, CirclePoint(0.0), 0.05, 0.9, n_samples=50_000)
    assert lower < upper


def test_increasing_functions_are_rejected(tree, rng):
    b = tree.random_boundary(rng, 1)[0]
    with pytest.raises(DomainError):
        measure_lab.decreasing_integral_bounds(tree, lambda u: u, b, 0.1, 0.5)


@pytest.mark.parametrize('s', [0.5, 0.1, 1e-3])
def test_logarithmic_bounds(tree, s):
    lower, upper, actual = measure_lab.int_as_log_bounds(tree, s=s)
    assert lower <= actual <= upper
    lower, upper, actual = measure_lab.int_as_log_bounds(PlaneModel('genus2'), s=s)
    assert lower <= actual <= upper


def test_logarithmic_bounds_shadow_form(tree):
    lower, upper, actual = measure_lab.int_as_log_bounds(tree, q=tree.word('abAB'))
    assert lower <= actual <= upper
    with pytest.raises(DomainError):
        measure_lab.int_as_log_bounds(tree, s=0.5, q=tree.word('a'))


def test_shadow_measures_are_bounded_below(tree):
    points = [tree.word(w) for w in ('a', 'ab', 'abba')]
    result = measure_lab.shadow_measure_bounds(tree, points)
    # nu_q(B(q)) = 3/4 for every q != p
    assert result['infimum'] == pytest.approx(0.75)
    plane = measure_lab.shadow_measure_bounds(PlaneModel('genus2'), [0.5j, 0.9])
    assert plane['infimum'] > 0


def test_sampling_set_on_the_tree(tree, rng):
    S = measure_lab.build_sampling_set(tree, 3, rng, n_check=50)
    assert len(S) == 36
    assert S.radius == pytest.approx(math.exp(-2.5))
    assert S.checked['min_count'] >= 1
    assert S.checked['max_count'] <= S.multiplicity


def test_sampling_needs_large_t(tree):
    with pytest.raises(DomainError):
        measure_lab.build_sampling_set(tree, Fraction(1, 2))


def test_sampled_lambda_integral(tree, rng):
    S = measure_lab.build_sampling_set(tree, 3, rng, n_check=20)
    q = tree.word('aba')
    L = tree.eta * (2 * tree.radius + 3 * tree.delta)
    estimate, C_L = measure_lab.sampled_integral(
        lambda b: tree.lambda_exact(q, b), S, L,
        integral=measure_lab.lambda_l1(tree, q), rng=rng)
    assert C_L > 1
    assert estimate > 0


@pytest.mark.parametrize('text,t', [('a', 2), ('ab', 3), ('abAB', 4)])
def test_lambda_average(tree, text, t):
    average, bound = measure_lab.lambda_average_check(tree, tree.word(text), t)
    assert float(average) <= bound


def test_lambda_average_needs_short_q(tree):
    with pytest.raises(DomainError):
        measure_lab.lambda_average_check(tree, tree.word('abab'), 2)


def test_certificate_rejects_swapped_constants():
    with pytest.raises(CertificationError):
        measure_lab.RegularityCertificate(1.0, 0.8, 0.5, '', 0.8, 0.5)
