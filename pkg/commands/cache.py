import click
from flask import Blueprint, current_app

from commands.common import experiment
from extensions import cache_store
from hyperrep.plane import PRESETS, build_group, relation_residual
from utils import notify

cache_bp = Blueprint('cache', __name__, cli_group='cache')


@cache_bp.cli.command('build')
@click.option('--model', 'preset', default='genus2', show_default=True,
              help='group preset: genus2 | triangle237')
@click.option('--t-max', 't_max', type=float, default=12.0, show_default=True)
@experiment
def build(preset, t_max):
    """Enumerate the orbit of the basepoint up to t-max and store it."""
    preset = preset.split(':', 1)[-1]
    group = build_group(preset)
    residual = relation_residual(group)
    if residual > current_app.config['ALGEBRAIC_TOL']:
        notify('relation residual %.3g exceeds tolerance' % residual, 'warning')
    cache = cache_store.build(preset, t_max, current_app.config['ALGEBRAIC_TOL'],
                              current_app.config['THREADS'])
    notify('%s: %d orbit points up to %.6g' % (group.name, len(cache), t_max),
           'success')


@cache_bp.cli.command('info')
def info():
    """List stored orbit caches."""
    entries = cache_store.entries()
    if not entries:
        notify('no orbit caches in %s' % cache_store.directory, 'info')
        return
    tol = current_app.config['ALGEBRAIC_TOL']
    for name in sorted(PRESETS):
        cache = cache_store.load(name, 0.0, tol)
        if cache is not None:
            click.echo('%s t_max=%.6g points=%d separation=%.6g'
                       % (name, cache.t_max, len(cache), cache.separation))


@cache_bp.cli.command('clear')
def clear():
    """Delete every stored orbit cache."""
    removed = cache_store.clear()
    notify('removed %d cache file(s)' % removed, 'success')
