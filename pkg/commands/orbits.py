from fractions import Fraction

import click
import numpy as np
from flask import Blueprint

from commands.common import experiment, load_run, run_options, set_option
from commands.export import write_result
from hyperrep import counting, spectra
from hyperrep.errors import DomainError
from hyperrep.plane import PlaneModel
from hyperrep.rep_ops import CylinderFunction
from hyperrep.tree import CylinderSet, TreeModel
from hyperrep.words import ReducedWord
from utils import parse_number

orbits_bp = Blueprint('orbits', __name__, cli_group=None)


def _word_list(model, text, rng, count=20, max_length=6):
    if text:
        return [w.strip() for w in text.split(',') if w.strip()]
    if isinstance(model, TreeModel):
        words = []
        for _ in range(count):
            w = model.random_word(rng, int(rng.integers(1, max_length + 1)))
            words.append(str(ReducedWord(w, model.edge)))
        return words
    letters = sorted(k for k in model.group.generators if k.islower())
    return [''.join(letters[int(i)] for i in rng.integers(0, len(letters), n))
            for n in rng.integers(1, max_length + 1, count)]


@orbits_bp.cli.command('equidist')
@run_options(default_t='2..10')
@set_option('U', default='a')
@set_option('V', default='b', help_text="U' (direction of gamma p)")
@experiment
def equidist(U, V, **kw):
    """Two-sided directional frequency against nu(U) nu(U')."""
    run = load_run(**kw)
    model = run.model
    if isinstance(model, PlaneModel):
        run.need_cache(max(float(t) for t in run.t_values) + model.radius)
    series = counting.equidistribution_series(model, run.boundary_set(U),
                                              run.boundary_set(V), run.t_values,
                                              threads=run.config.threads)
    columns = ['t', 's_t_size', 'freq', 'target', 'abs_error']
    write_result('equidist', columns, [vars(r) for r in series], run.config)


@orbits_bp.cli.command('growth')
@run_options(default_t='4..14')
@experiment
def growth(**kw):
    """Least-squares growth exponent of N(t) = #{gamma : |gamma| <= t}."""
    run = load_run(**kw)
    model = run.model
    ts = [float(t) for t in run.t_values]
    if isinstance(model, PlaneModel):
        run.need_cache(max(ts))
    slope, residual = counting.growth_exponent(model, ts)
    rows = [{'t': t, 'count': counting.orbit_count(model, t)} for t in ts]
    write_result('growth', ['t', 'count'], rows, run.config,
                 extra={'eta_hat': slope, 'residual': residual, 'eta': model.eta})


@orbits_bp.cli.command('margulis-fit')
@run_options(default_t='8,9,10,11')
@click.option('--a', 'a', type=float, default=0.5, show_default=True)
@click.option('--tolerance', type=float, default=0.15, show_default=True)
@experiment
def margulis_fit(a, tolerance, **kw):
    """Fitted Margulis constant for two set pairs; they must agree."""
    run = load_run(**kw)
    model = run.model
    ts = [float(t) for t in run.t_values]
    if isinstance(model, PlaneModel):
        run.need_cache(max(ts) + a)
        pairs = counting.arc_pairs()
    else:
        pairs = [(run.boundary_set('a'), run.boundary_set('b')),
                 (run.boundary_set('b,B'), run.boundary_set('a,b'))]
    fits = [counting.margulis_fit(model, U, V, a, ts) for U, V in pairs]
    spread = counting.check_margulis_agreement(fits, tolerance)
    rows = [{'pair': i, 't': t, 'value': v}
            for i, fit in enumerate(fits) for t, v in zip(ts, fit.values)]
    write_result('margulis-fit', ['pair', 't', 'value'], rows, run.config,
                 extra={'spread': spread,
                        'constants': ' '.join('%.17g' % f.constant for f in fits)})


@orbits_bp.cli.command('mls')
@run_options()
@click.option('--gamma', default=None, help='comma list of words (default: random)')
@click.option('--count', type=int, default=20, show_default=True)
@experiment
def mls(gamma, count, **kw):
    """Marked length spectrum on a list of words."""
    run = load_run(**kw)
    rng = np.random.default_rng(run.config.seed)
    words = _word_list(run.model, gamma, rng, count)
    table = spectra.MarkedLengthTable.compute(run.model, words)
    rows = [{'word': w, 'length': length} for w, length in table.rows]
    write_result('mls', ['word', 'length'], rows, run.config)


@orbits_bp.cli.command('rescale-check')
@run_options()
@click.option('--scale', default='2', show_default=True, help='positive rational c')
@click.option('--gamma', default='ab,aBA,abAB,b', show_default=True)
@experiment
def rescale_check(scale, gamma, **kw):
    """Rescaling the metric scales lengths and keeps every coefficient."""
    run = load_run(**kw)
    model = run.model
    if not isinstance(model, TreeModel):
        raise DomainError('rescale-check runs on free-group models')
    c = Fraction(parse_number(scale))
    one = CylinderFunction.constant(model)
    pairs = [(one, one),
             (CylinderFunction.indicator(CylinderSet.cylinder(model, model.word('a'))),
              CylinderFunction.indicator(CylinderSet.cylinder(model, model.word('b'))))]
    words = [w.strip() for w in gamma.split(',') if w.strip()]
    report = spectra.rescaling_invariance_check(model, c, words, pairs)
    scaled = TreeModel(model.rank, model.edge * c, model.depth)
    rows = [{'word': w, 'length': spectra.translation_length(model, model.word(w)),
             'scaled_length': spectra.translation_length(scaled, scaled.word(w))}
            for w in words]
    write_result('rescale-check', ['word', 'length', 'scaled_length'], rows,
                 run.config, extra={'coefficients': report.coefficients,
                                    'max_coefficient_defect': report.max_coefficient_defect})
