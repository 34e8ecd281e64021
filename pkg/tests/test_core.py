import math

import pytest

from hyperrep import core
from hyperrep.errors import DomainError
from hyperrep.plane import CirclePoint, PlaneModel, busemann_by_rays


def test_gromov_product_on_the_tree(tree):
    x, y = tree.word('abb'), tree.word('abA')
    assert core.gromov_product(tree, x, y) == 2
    assert core.gromov_product(tree, x, y, base=tree.word('a')) == 1


def test_visual_distance_and_shadow(tree):
    b, c = tree.boundary('ab(a)'), tree.boundary('aB(a)')
    assert core.visual_distance(tree, b, c) == math.exp(-1)
    assert core.visual_distance(tree, b, b) == 0.0
    ball = core.shadow(tree, tree.word('ab'))
    assert ball.closed
    assert b in ball
    assert c not in ball
    assert ball.measure() == tree.depth_measure(2)


def test_shadow_of_basepoint_is_everything(tree):
    ball = core.shadow(tree, tree.basepoint)
    assert ball.whole
    assert ball.measure() == 1


def test_balls_are_open_by_default(tree):
    b = tree.boundary('ab(a)')
    ball = core.BoundaryBall(tree, b, math.exp(-1))
    assert tree.boundary('aB(a)') not in ball
    assert tree.boundary('aB(a)') in core.BoundaryBall(tree, b, math.exp(-1),
                                                       closed=True)


def test_chopped_product_is_truncated(tree):
    q = tree.word('ab')
    assert core.chopped_product(tree, q, tree.boundary('abb(a)')) == 2
    assert core.chopped_product(tree, q, tree.boundary('aB(a)')) == 1
    with pytest.raises(DomainError):
        core.chopped_product(tree, tree.basepoint, tree.boundary('(a)'))


def test_tree_is_zero_hyperbolic(tree, rng):
    assert core.certify_hyperbolicity(tree, rng, n=500) <= 0


def test_comparison_report_on_the_tree(tree, rng):
    qs = [tree.word(w) for w in ('a', 'ab', 'abAB', 'bbb')]
    bs = tree.random_boundary(rng, len(qs))
    assert core.check_comparison(tree, zip(qs, bs)) == len(qs)
    rep = core.comparison_report(tree, tree.word('ab'), tree.boundary('ab(a)'))
    assert rep['beta'] == -2
    assert rep['lambda'] == pytest.approx(3.0)


def test_shadow_cone_sandwich_on_the_tree(tree, rng):
    result = core.shadow_comparison_check(tree, tree.word('ab'), rng, n=50)
    assert result['inner_checked'] >= 1
    assert result['outer_checked'] >= 1


def test_thicken_needs_positive_parameter(tree, cyl):
    with pytest.raises(DomainError):
        core.thicken(cyl('a'), 0)


def test_busemann_cocycle_on_the_tree(tree, rng):
    samples = []
    for b in tree.random_boundary(rng, 20):
        x, y, z = tree.random_points(rng, 3, 5.0)
        samples.append((b, x, y, z))
    assert core.cocycle_residual(tree, samples) == 0


def test_plane_gromov_products():
    model = PlaneModel('genus2')
    b, c = CirclePoint(0.0), CirclePoint(math.pi)
    assert core.gromov_product(model, b, c) == pytest.approx(0.0, abs=1e-15)
    assert core.visual_distance(model, b, CirclePoint(math.pi / 3)) == pytest.approx(0.5)


def test_plane_busemann_matches_long_rays():
    model = PlaneModel('genus2')
    b = CirclePoint(0.3)
    x, y = 0.2 + 0.1j, -0.4j
    assert model.busemann(b, x, y) == pytest.approx(busemann_by_rays(b, x, y, far=14),
                                                    abs=1e-4)
    assert model.busemann(CirclePoint(0.0), 0j, 0.5) == pytest.approx(-math.log(3))


@pytest.mark.slow
def test_plane_hyperbolicity_defect_stays_below_delta(rng):
    model = PlaneModel('genus2')
    worst = core.certify_hyperbolicity(model, rng, n=10_000)
    assert worst <= model.delta


@pytest.mark.slow
def test_plane_busemann_cocycle_over_many_samples(rng):
    model = PlaneModel('genus2')
    samples = [(b, *model.random_points(rng, 3, 6.0))
               for b in model.random_boundary(rng, 10_000)]
    assert core.cocycle_residual(model, samples) <= 1e-9
