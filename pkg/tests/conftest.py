import numpy as np
import pytest

from app import create_app
from hyperrep.plane import PlaneModel, build_group, build_orbit_cache
from hyperrep.tree import CylinderSet, TreeModel


@pytest.fixture
def app(tmp_path):
    app = create_app({'TESTING': True, 'CACHE_DIR': str(tmp_path / 'cache'),
                      'THREADS': 1, 'SEED': 0})
    yield app


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture
def tree():
    return TreeModel(2)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def cyl(tree):
    def make(prefix):
        return CylinderSet.cylinder(tree, prefix)
    return make


@pytest.fixture(scope='session')
def genus2_orbit():
    """Octagon-group orbit out to 12.5; built once, only for slow tests."""
    return build_orbit_cache(build_group('genus2'), 12.5)


@pytest.fixture
def genus2(genus2_orbit):
    return PlaneModel('genus2', cache=genus2_orbit)
