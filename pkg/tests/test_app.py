from fractions import Fraction

import pytest

from forms import validate_run_config
from hyperrep.errors import DomainError
from hyperrep.plane import ArcSet, PlaneModel
from hyperrep.tree import CylinderSet, TreeModel
from models import build_model, format_model_spec, parse_model_spec
from utils import format_number, parse_boundary_set, parse_t_values

VALID = {'model': 'free:rank=2', 't': '2..12', 't_max': None, 'depth': 16,
         'seed': 0, 'threads': 1, 'out': None, 'format': 'csv'}


def test_model_specs_round_trip(app):
    for spec in ('free:rank=2,edge=1', 'free:rank=3,edge=3/2'):
        model = build_model(spec, app.config)
        assert format_model_spec(model) == spec
        assert build_model(format_model_spec(model), app.config).edge == model.edge


def test_plane_specs(app):
    model = build_model('plane:triangle237', app.config)
    assert isinstance(model, PlaneModel)
    assert model.group.name == 'triangle-2-3-7'
    assert parse_model_spec('plane:genus2,delta=0.5') == ('plane', {'preset': 'genus2',
                                                                    'delta': '0.5'})


@pytest.mark.parametrize('spec', ['torus:genus1', 'free:rank=x', 'free:colour=red',
                                  'plane:genus7', 'free:rank=1'])
def test_bad_model_specs(app, spec):
    with pytest.raises(DomainError):
        build_model(spec, app.config)


def test_run_config_validation():
    config, errors = validate_run_config(VALID)
    assert errors is None
    assert config.depth == 16
    assert 'threads' not in config.echo()


@pytest.mark.parametrize('field,value', [('threads', 0), ('format', 'xml'),
                                         ('model', 'tree'), ('depth', -1),
                                         ('t', '2..x')])
def test_run_config_rejections(field, value):
    values = dict(VALID)
    values[field] = value
    config, errors = validate_run_config(values)
    assert config is None
    assert any(e.startswith(field) for e in errors)


def test_t_values():
    assert parse_t_values('2..5') == [2, 3, 4, 5]
    assert parse_t_values('1/2,3') == [Fraction(1, 2), 3]
    assert parse_t_values('7') == [7]
    with pytest.raises(DomainError):
        parse_t_values('5..2')


def test_boundary_set_grammar():
    tree = TreeModel(2)
    assert parse_boundary_set(tree, 'a,bA') == (CylinderSet.cylinder(tree, 'a')
                                                | CylinderSet.cylinder(tree, 'bA'))
    assert parse_boundary_set(tree, '!a').measure() == Fraction(3, 4)
    assert parse_boundary_set(tree, 'B').is_whole()
    arcs = parse_boundary_set(PlaneModel('genus2'), '0:1/4,1/2:3/4')
    assert isinstance(arcs, ArcSet)
    assert arcs.measure() == pytest.approx(0.5)
    with pytest.raises(DomainError):
        parse_boundary_set(PlaneModel('genus2'), '0.3')


def test_number_format():
    assert format_number(Fraction(2, 3)) == '0.66666666666666663'
    assert format_number(7) == '7'
    assert format_number(None) == ''
