from fractions import Fraction

import numpy as np
import pytest

from hyperrep import rep_ops
from hyperrep.errors import CertificationError, DomainError, ResolutionBudgetError
from hyperrep.plane import (ArcSet, PlaneModel, build_group, build_orbit_cache,
                            evaluate_word)
from hyperrep.rep_ops import CylinderFunction
from hyperrep.scalar import ExactScalar


@pytest.fixture
def one(tree):
    return CylinderFunction.constant(tree)


def test_coefficient_of_ab_is_two_thirds(tree, one):
    value = rep_ops.matrix_coefficient(tree, tree.word('ab'), one, one)
    assert value == Fraction(2, 3)
    assert float(value) == 2 / 3


def test_streamed_coefficients_match_shell_sums(tree, one, rng):
    for n in range(9):
        w = tree.random_word(rng, n)
        value = rep_ops.matrix_coefficient(tree, w, one, one)
        assert value == rep_ops.lambda_shell_sum(tree, n)
        assert value == rep_ops.lambda_l1_closed_form(tree, n)


def test_streamed_coefficients_match_brute_force(tree, cyl):
    g = CylinderFunction.indicator(cyl('a') | cyl('bA'))
    h = CylinderFunction.indicator(cyl('B'))
    for text in ('a', 'bA', 'abAB', 'BBa'):
        w = tree.word(text)
        streamed = rep_ops.matrix_coefficient(tree, w, g, h)
        assert streamed == rep_ops.apply_rho(tree, w, g).inner(h)


def test_lambda_on_its_own_cylinder(tree, one, cyl):
    chi_a = CylinderFunction.indicator(cyl('a'))
    value = rep_ops.matrix_coefficient(tree, tree.word('a'), one, chi_a)
    assert value == ExactScalar(0, Fraction(1, 4), 3)


def test_rho_is_unitary(tree, cyl):
    u = CylinderFunction.indicator(cyl('ab')) + 2 * CylinderFunction.indicator(cyl('B'))
    v = CylinderFunction.indicator(cyl('a'))
    for text in ('a', 'ab', 'BAb'):
        assert rep_ops.rho_unitarity_defect(tree, tree.word(text), u, v) == 0


def test_budget_is_enforced(tree, cyl):
    g = CylinderFunction.indicator(cyl('ab'))
    with pytest.raises(ResolutionBudgetError) as info:
        rep_ops.matrix_coefficient(tree, tree.word('abab'), g, g, budget=5)
    assert info.value.required == 6
    assert info.value.max_feasible == 3


def test_cylinder_functions(tree, cyl):
    f = CylinderFunction.indicator(cyl('a'))
    assert f.norm2() == Fraction(1, 4)
    assert f.refine(2) == f
    assert (f + f) == 2 * f
    assert f(tree.boundary('ab(a)')) == 1
    assert f(tree.boundary('(b)')) == 0


def test_lambda_estimation_window(tree):
    low, high = rep_ops.lambda_estimation_window(tree, range(1, 21))
    assert 0.45 <= low <= high <= 1.6
    # (n + 2) / 2n on the rank-2 tree
    assert high == pytest.approx(1.5)
    assert low == pytest.approx(0.55)


def test_plane_lambda_norm_closed_form():
    model = PlaneModel('genus2')
    for d in (0.5, 2.0, 6.0):
        q = complex(np.tanh(d / 2))
        assert float(rep_ops.plane_lambda_l1(d)) == pytest.approx(
            rep_ops.lambda_l1_quad(model, q), rel=1e-7)
    mean, err = rep_ops.lambda_l1_estimate(model, 0.5, n_samples=100_000)
    assert abs(mean - float(rep_ops.plane_lambda_l1(2 * np.arctanh(0.5)))) < 4 * err


def test_sup_norm_is_exactly_one_on_the_tree(tree, rng):
    for t in range(1, 7):
        assert rep_ops.sup_norm_Tt1(tree, t) == 1
    pts = tree.random_boundary(rng, 3)
    assert rep_ops.tree_sup_norm_direct(tree, 3, pts) == 1


def test_Tt_applied_to_one(tree, one):
    T = rep_ops.build_Tt(tree, lambda b: 1, 2)
    assert T.apply(one) == one
    assert T.pair(one, one) == 1


def test_sup_norm_domain(tree):
    with pytest.raises(DomainError):
        rep_ops.sup_norm_Tt1(tree, Fraction(1, 2))


def test_convergence_series(tree, cyl):
    U, V = cyl('a'), cyl('b')
    rows = rep_ops.convergence_experiment(tree, U, V, U, [2, 3, 4])
    assert [r.s_t_size for r in rows] == [12, 36, 108]
    assert all(r.target == Fraction(1, 16) for r in rows)
    assert all(r.wall_ms == 0.0 for r in rows)
    with pytest.raises(DomainError):
        rep_ops.convergence_experiment(tree, U, V, U, [3, 2])


def test_convergence_is_independent_of_workers(tree, cyl):
    U, V, W_ = cyl('a'), cyl('b'), cyl('aB')
    serial = rep_ops.tt_pairing(tree, U, V, W_, 4, threads=1)
    pooled = rep_ops.tt_pairing(tree, U, V, W_, 4, threads=2)
    assert serial == pooled


def test_complement_patterns_sum_to_one(tree, cyl):
    total = rep_ops.sign_pattern_sum(tree, cyl('a'), cyl('b'), cyl('a'), 3)
    assert total == 1


def test_tail_bound(tree, cyl):
    lhs, rhs = rep_ops.tail_bound_check(tree, tree.word('aa'), cyl('b'), 1.0)
    assert 0 < lhs <= rhs
    with pytest.raises(DomainError):
        rep_ops.tail_bound_check(tree, tree.word('bb'), cyl('b'), 1.0)


def test_limsup_bound(tree, cyl):
    for dual in (False, True):
        left, right = rep_ops.limsup_bound(tree, cyl('a'), cyl('b'), 1.0, 4, 2.0, dual)
        assert left <= right
    with pytest.raises(DomainError):
        rep_ops.limsup_bound(tree, cyl('a'), cyl('b'), 1.0, 4, 5.0)


def test_intertwiner(tree, rng, cyl):
    funcs = [CylinderFunction.indicator(cyl('a')), CylinderFunction.indicator(cyl('bA'))]
    gammas = [tree.word(x) for x in ('a', 'bA', 'abb')]
    pts = tree.random_boundary(rng, 5)
    assert rep_ops.intertwiner_check(tree, tree.word('ab'), gammas, funcs, pts) == 30


def test_identity_compresses_to_identity(tree):
    op = rep_ops.compress(tree, (), 1)
    assert np.array_equal(op.to_float(), np.eye(4))


def test_depth_one_compressions_reach_full_rank(tree):
    sweep = rep_ops.rank_sweep(tree, 1, 6)
    ranks = [r for _, r in sweep]
    assert ranks == sorted(ranks)
    assert ranks[0] == 1
    assert ranks[-1] == 16


def test_rank_sweep_dimension_guard(tree):
    with pytest.raises(ResolutionBudgetError):
        rep_ops.rank_sweep(tree, 3, 1, max_dim=10)


def test_plane_unitarity():
    group = build_group('genus2')
    g = evaluate_word(group, 'ab')
    u = rep_ops.ArcFunction.indicator(ArcSet.from_turns([(0, 0.3)]))
    assert rep_ops.plane_unitarity_defect(g, u, u) < 1e-6


def test_plane_coefficient_of_constants():
    group = build_group('genus2')
    g = evaluate_word(group, 'a')
    one = rep_ops.ArcFunction.constant()
    value = rep_ops.plane_matrix_coefficient(g, one, one)
    assert value == pytest.approx(float(rep_ops.plane_lambda_l1(g.displacement())),
                                  rel=1e-7)


def test_plane_sup_norm_is_finite():
    model = PlaneModel('genus2', cache=build_orbit_cache(build_group('genus2'), 7.5))
    value = rep_ops.sup_norm_Tt1(model, 5.0, n_angles=32)
    assert 0 < value < 10


def _rows(errors, t0=6):
    return [rep_ops.ConvergenceRow(t0 + i, 1, 0, 0, e)
            for i, e in enumerate(errors)]


def test_convergence_certificate_accepts_decay():
    slope = rep_ops.certify_convergence(_rows([0.04 / (1 + i) for i in range(7)]))
    assert slope < 0
    assert rep_ops.certify_convergence(_rows([0.02, 0.01])) is None


@pytest.mark.parametrize('errors', [
    [0.01, 0.02, 0.005],
    [0.3, 0.2, 0.15],
    [0.01, 0.01, 0.01, 0.01],
])
def test_convergence_certificate_rejects(errors):
    with pytest.raises(CertificationError):
        rep_ops.certify_convergence(_rows(errors))


def test_convergence_certificate_slope_window():
    fast = [0.05 * (6 / t) ** 3 for t in range(6, 13)]
    assert rep_ops.certify_convergence(_rows(fast)) < -1.6
    with pytest.raises(CertificationError):
        rep_ops.certify_convergence(_rows(fast), slope_range=(-1.6, -0.4))


def test_early_rows_are_not_certified():
    rows = [rep_ops.ConvergenceRow(2, 12, 0, 0, 0.5),
            rep_ops.ConvergenceRow(3, 36, 0, 0, 0.9)]
    assert rep_ops.certify_convergence(rows) is None


def test_tree_series_passes_its_certificate(tree, cyl):
    U, V = cyl('a'), cyl('b')
    rows = rep_ops.convergence_experiment(tree, U, V, U, range(2, 9))
    rep_ops.certify_convergence(rows)
