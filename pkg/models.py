from fractions import Fraction

from extensions import cache_store
from hyperrep.errors import DomainError
from hyperrep.plane import ALIASES, PRESETS, PlaneModel
from hyperrep.tree import TreeModel


def parse_model_spec(spec):
    """Split ``kind:key=value,...`` into the kind and an option dict.

    For plane models the first bare token is the group preset.
    """
    kind, _, rest = spec.strip().partition(':')
    kind = kind.strip().lower()
    options = {}
    for i, part in enumerate(p.strip() for p in rest.split(',') if p.strip()):
        key, eq, value = part.partition('=')
        if not eq:
            if i == 0 and kind == 'plane':
                options['preset'] = key
                continue
            raise DomainError('model option %r needs key=value' % part)
        options[key.strip()] = value.strip()
    return kind, options


def format_model_spec(model):
    if isinstance(model, TreeModel):
        return 'free:rank=%d,edge=%s' % (model.rank, model.edge)
    return 'plane:%s,delta=%r' % (model.group.name, model.delta)


def build_model(spec, config):
    kind, options = parse_model_spec(spec)
    if kind == 'free':
        unknown = set(options) - {'rank', 'edge'}
        if unknown:
            raise DomainError('unknown free-group options: %s'
                              % ', '.join(sorted(unknown)))
        try:
            rank = int(options.get('rank', 2))
            edge = Fraction(options.get('edge', '1'))
        except ValueError as exc:
            raise DomainError('bad free-group option: %s' % exc) from None
        return TreeModel(rank, edge, config['DEPTH_BUDGET'])
    if kind == 'plane':
        unknown = set(options) - {'preset', 'delta'}
        if unknown:
            raise DomainError('unknown plane options: %s' % ', '.join(sorted(unknown)))
        preset = options.get('preset', 'genus2')
        if preset not in PRESETS and preset not in ALIASES:
            raise DomainError('unknown group preset %r' % preset)
        delta = float(options.get('delta', config['PLANE_DELTA']))
        return PlaneModel(preset, delta, config['ALGEBRAIC_TOL'],
                          config['GEOMETRIC_TOL'])
    raise DomainError('unknown model kind %r (expected free or plane)' % kind)


def attach_cache(model, t_needed, config):
    """Make sure a plane model carries an orbit cache covering ``t_needed``."""
    if not isinstance(model, PlaneModel):
        return model
    if model.cache is None or model.cache.t_max < t_needed:
        model.cache = cache_store.get(model.group.name, t_needed,
                                      config['ALGEBRAIC_TOL'],
                                      config.get('THREADS', 1))
    return model
