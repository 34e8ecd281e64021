import functools
import sys

import click
from flask import current_app

from forms import validate_run_config
from hyperrep.errors import CertificationError, DomainError
from models import attach_cache, build_model
from utils import notify, parse_boundary_set, parse_t_values


def run_options(default_t=None):
    """The flags every experiment shares."""
    def decorate(func):
        options = [
            click.option('--model', 'model_spec', default='free:rank=2',
                         show_default=True,
                         help='free:rank=K,edge=E | plane:genus2 | plane:triangle237'),
            click.option('--t', 't_text', default=default_t,
                         help='a..b, a comma list or one value'),
            click.option('--t-max', 't_max', default=None,
                         help='orbit-cache radius for plane models'),
            click.option('--depth', type=int, default=None,
                         help='resolution budget (cylinder depth)'),
            click.option('--seed', type=int, default=None),
            click.option('--threads', type=int, default=None),
            click.option('--out', default=None, help='output file (default stdout)'),
            click.option('--format', 'fmt', default='csv', show_default=True,
                         help='csv | json | xlsx'),
        ]
        for option in reversed(options):
            func = option(func)
        return func
    return decorate


def set_option(name, default=None, help_text=None):
    return click.option('--' + name, name, default=default,
                        help=help_text or 'boundary set: prefixes (tree) or '
                        'start:end turns (plane); "!" complements, "B" is all')


class Run:
    """Validated run configuration plus the model it describes."""

    def __init__(self, config, model):
        self.config = config
        self.model = model

    @property
    def t_values(self):
        return parse_t_values(self.config.t)

    def boundary_set(self, text):
        return parse_boundary_set(self.model, text)

    def need_cache(self, t_needed):
        attach_cache(self.model, t_needed, current_app.config)
        return self.model


def load_run(model_spec, t_text, t_max, depth, seed, threads, out, fmt):
    app_config = current_app.config
    values = {
        'model': model_spec, 't': t_text, 't_max': t_max,
        'depth': app_config['DEPTH_BUDGET'] if depth is None else depth,
        'seed': app_config['SEED'] if seed is None else seed,
        'threads': app_config['THREADS'] if threads is None else threads,
        'out': out, 'format': fmt,
    }
    config, errors = validate_run_config(values)
    if errors:
        raise click.UsageError('; '.join(errors))
    model_config = dict(app_config)
    model_config['DEPTH_BUDGET'] = config.depth
    try:
        model = build_model(config.model, model_config)
    except DomainError as exc:
        raise click.UsageError(str(exc)) from None
    return Run(config, model)


def experiment(func):
    """Map library errors onto exit statuses: usage 2, failed check 1."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except CertificationError as exc:
            notify('check failed: %s' % exc, 'danger')
            sys.exit(1)
        except DomainError as exc:
            raise click.UsageError(str(exc)) from None
    return wrapper
