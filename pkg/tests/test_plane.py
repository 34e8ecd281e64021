import math

import numpy as np
import pytest

from hyperrep import plane
from hyperrep.errors import CacheExhaustedError, DomainError
from hyperrep.plane import (ArcSet, CirclePoint, MobiusIsometry, OrbitCache,
                            PlaneModel, build_group, build_orbit_cache,
                            disk_distance, evaluate_word, lambda_plane,
                            mc_boundary_integral, relation_residual)

SIDE = 2 * math.acosh(1 + math.sqrt(2))


@pytest.fixture(scope='module')
def small_cache():
    return build_orbit_cache(build_group('genus2'), 4.0)


@pytest.mark.parametrize('preset', ['genus2', 'triangle237'])
def test_relations_hold(preset):
    assert relation_residual(build_group(preset)) < 1e-9


def test_unknown_preset():
    with pytest.raises(DomainError):
        build_group('genus3')


def test_generators_translate_by_the_side_pairing_length():
    group = build_group('genus2')
    for letter in 'abcdABCD':
        assert group.generators[letter].displacement() == pytest.approx(SIDE)
    assert evaluate_word(group, 'aA').distance_to_identity() < 1e-12


def test_mobius_action_is_an_isometry():
    g = evaluate_word(build_group('genus2'), 'abC')
    x, y = 0.1 + 0.3j, -0.5 + 0.05j
    assert disk_distance(g.act(x), g.act(y)) == pytest.approx(disk_distance(x, y))
    assert disk_distance(0j, g.act(0j)) == pytest.approx(g.displacement())


def test_determinant_is_checked():
    with pytest.raises(DomainError):
        MobiusIsometry(2.0, 0.0, 0.0, 1.0)


def test_orbit_cache_near_the_basepoint(small_cache):
    # the basepoint and its eight side-pairing neighbours
    assert small_cache.count_within(SIDE + 0.1) == 9
    assert small_cache.distances[0] == pytest.approx(0.0, abs=1e-12)
    assert np.all(np.diff(small_cache.distances) >= 0)
    with pytest.raises(CacheExhaustedError):
        small_cache.count_within(5.0)


def test_orbit_cache_survives_bson(small_cache):
    restored = OrbitCache.from_bson(small_cache.to_bson())
    assert restored.words == small_cache.words
    assert np.allclose(restored.distances, small_cache.distances)
    assert restored.matches(small_cache.preset, 3.0, small_cache.tolerance)
    assert not restored.matches(small_cache.preset, 5.0, small_cache.tolerance)


def test_annulus_needs_cache():
    model = PlaneModel('genus2')
    with pytest.raises(CacheExhaustedError):
        model.enumerate_annulus_numeric(5.0)


def test_ball_measure_is_arc_length():
    model = PlaneModel('genus2')
    assert model.ball_measure(CirclePoint(0.0), 0.5) == pytest.approx(1 / 3)
    assert model.ball_measure(CirclePoint(0.0), 1.0) == 1.0


def test_arc_sets():
    U = ArcSet.from_turns([(0.9, 1.1)])
    assert len(U.arcs) == 2
    assert U.measure() == pytest.approx(0.2)
    assert U.contains_angle(0.0)
    assert U.complement().measure() == pytest.approx(0.8)
    assert (U & ArcSet.from_turns([(0, 0.5)])).measure() == pytest.approx(0.1)
    assert U.thicken(50).measure() == pytest.approx(0.2)


def test_lambda_squared_integrates_to_one():
    q = 0.6 * np.exp(0.4j)
    mean, err = mc_boundary_integral(lambda a: lambda_plane(q, a) ** 2, 200_000, 1)
    assert abs(mean - 1) < 4 * err


def test_monte_carlo_needs_samples():
    with pytest.raises(DomainError):
        mc_boundary_integral(lambda a: a, 0, 0)


def test_orbit_cache_does_not_depend_on_chunking_or_workers(small_cache, monkeypatch):
    monkeypatch.setattr(plane, 'FRONTIER_CHUNK', 7)
    chunked = build_orbit_cache(build_group('genus2'), 4.0, threads=2)
    assert chunked.words == small_cache.words
    assert np.array_equal(chunked.distances, small_cache.distances)
    assert np.array_equal(chunked.matrices, small_cache.matrices)
