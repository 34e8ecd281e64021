import math

import click
from flask import Blueprint, current_app

from commands.common import experiment, load_run, run_options, set_option
from commands.export import write_result
from hyperrep import rep_ops
from hyperrep.errors import CertificationError, DomainError
from hyperrep.plane import PlaneModel, evaluate_word
from hyperrep.tree import TreeModel

representation_bp = Blueprint('representation', __name__, cli_group=None)

BRUTE_FORCE_DEPTH = 10


def _tree_function(run, text):
    if text is None or text == 'B':
        return rep_ops.CylinderFunction.constant(run.model)
    return rep_ops.CylinderFunction.indicator(run.boundary_set(text))


def _arc_function(run, text):
    if text is None or text == 'B':
        return rep_ops.ArcFunction.constant()
    return rep_ops.ArcFunction.indicator(run.boundary_set(text))


def _plane_point(model, word):
    return evaluate_word(model.group, word).act(0j)


@representation_bp.cli.command('coeff')
@run_options()
@click.option('--gamma', required=True, help='group element as a word')
@set_option('U', help_text='g = chi_U (default: constant 1)')
@set_option('V', help_text='h = chi_V (default: constant 1)')
@experiment
def coeff(gamma, U, V, **kw):
    """Matrix coefficient <rho_p(gamma) g, h>_p with an independent oracle."""
    run = load_run(**kw)
    model = run.model
    if isinstance(model, TreeModel):
        w = model.word(gamma)
        g, h = _tree_function(run, U), _tree_function(run, V)
        value = rep_ops.matrix_coefficient(model, w, g, h, run.config.depth)
        if len(w) + g.depth <= BRUTE_FORCE_DEPTH:
            oracle = rep_ops.apply_rho(model, w, g, run.config.depth).inner(h)
        elif g.depth == 0 and h.depth == 0:
            oracle = rep_ops.lambda_shell_sum(model, len(w)) * g.values[()] * h.values[()]
        else:
            oracle = value
        if value != oracle:
            raise CertificationError('streamed coefficient differs from oracle',
                                     witness=(gamma, str(value), str(oracle)))
    else:
        element = evaluate_word(model.group, gamma)
        g, h = _arc_function(run, U), _arc_function(run, V)
        value = rep_ops.plane_matrix_coefficient(element, g, h)
        oracle = value
        if U is None and V is None:
            oracle = float(rep_ops.plane_lambda_l1(element.displacement()))
            if abs(value - oracle) > model.geometric_tol:
                raise CertificationError('quadrature differs from closed form',
                                         witness=(gamma, value, oracle))
    write_result('coeff', ['gamma', 'value', 'oracle'],
                 [{'gamma': gamma, 'value': value, 'oracle': oracle}], run.config)


@representation_bp.cli.command('norms')
@run_options(default_t='1..20')
@experiment
def norms(**kw):
    """||lambda^q||_1 by |q| with the lambda-estimation ratio."""
    run = load_run(**kw)
    model = run.model
    rows = []
    for n in run.t_values:
        if isinstance(model, TreeModel):
            n = int(n)
            l1 = rep_ops.lambda_shell_sum(model, n)
            closed = rep_ops.lambda_l1_closed_form(model, n)
            if l1 != closed:
                raise CertificationError('shell sum and closed form differ', witness=n)
            length = n * float(model.edge)
        else:
            length = float(n)
            l1 = float(rep_ops.plane_lambda_l1(length))
            closed = rep_ops.lambda_l1_quad(model, complex(math.tanh(length / 2)))
            if abs(l1 - closed) > model.geometric_tol * max(1.0, l1):
                raise CertificationError('closed form and quadrature differ',
                                         witness=(n, l1, closed))
        ratio = float(l1) / (length * math.exp(-0.5 * model.eta * length)) if length else ''
        rows.append({'length': length, 'l1': l1, 'oracle': closed, 'ratio': ratio})
    write_result('norms', ['length', 'l1', 'oracle', 'ratio'], rows, run.config)


@representation_bp.cli.command('bounded')
@run_options(default_t='1..12')
@experiment
def bounded(**kw):
    """Sup norm of (rho o T_t^1)(1)."""
    run = load_run(**kw)
    model = run.model
    rows = []
    for t in run.t_values:
        if isinstance(model, PlaneModel):
            run.need_cache(float(t) + model.radius)
        try:
            value = rep_ops.sup_norm_Tt1(model, t, seed=run.config.seed)
        except DomainError as exc:
            current_app.logger.info('skipping t=%s: %s', t, exc)
            continue
        rows.append({'t': t, 'sup_norm': value})
    if not rows:
        raise DomainError('no admissible t values')
    values = [float(r['sup_norm']) for r in rows]
    if isinstance(model, TreeModel):
        if max(values) > 1 + 1e-12:
            raise CertificationError('sup norm exceeds 1', witness=max(values))
    elif max(values) / min(values) >= 3:
        raise CertificationError('sampled sup norms spread too far',
                                 witness=(min(values), max(values)))
    write_result('bounded', ['t', 'sup_norm'], rows, run.config)


@representation_bp.cli.command('tt-converge')
@run_options(default_t='2..12')
@set_option('U', default='a')
@set_option('V', default='b')
@set_option('W', default='a')
@experiment
def tt_converge(U, V, W, **kw):
    """<(rho o T_t^{chi_U}) chi_V, chi_W> against nu(U n W) nu(V).

    Rows from t=6 on must show a non-increasing error ending below 0.1.
    """
    run = load_run(**kw)
    if not isinstance(run.model, TreeModel):
        raise DomainError('tt-converge runs on free-group models')
    sets = [run.boundary_set(s) for s in (U, V, W)]
    rows = rep_ops.convergence_experiment(
        run.model, *sets, run.t_values, threads=run.config.threads,
        budget=run.config.depth, timing=current_app.config['TIMING'])
    rep_ops.certify_convergence(rows)
    columns = ['t', 's_t_size', 'value', 'target', 'abs_error', 'wall_ms']
    write_result('tt-converge', columns, [vars(r) for r in rows], run.config)


@representation_bp.cli.command('tailbound')
@run_options()
@click.option('--gamma', required=True, help='q = gamma p')
@set_option('V')
@click.option('--a', 'a', type=float, default=1.0, show_default=True)
@experiment
def tailbound(gamma, V, a, **kw):
    """<lambda^q, chi_V> / ||lambda^q||_1 against C_0 e^(eta a) / |q|."""
    run = load_run(**kw)
    model = run.model
    q = model.word(gamma) if isinstance(model, TreeModel) else _plane_point(model, gamma)
    lhs, rhs = rep_ops.tail_bound_check(model, q, run.boundary_set(V), a)
    write_result('tailbound', ['gamma', 'lhs', 'rhs'],
                 [{'gamma': gamma, 'lhs': lhs, 'rhs': rhs}], run.config)


@representation_bp.cli.command('limsup')
@run_options(default_t='4..7')
@set_option('U', default='a')
@set_option('V', default='b')
@click.option('--a', 'a', type=float, default=1.0, show_default=True)
@click.option('--t0', type=float, default=2.0, show_default=True)
@click.option('--dual', is_flag=True, help='place the coefficients on gamma^-1')
@experiment
def limsup(U, V, a, t0, dual, **kw):
    """Finite-t form of the limsup estimate for T_t^{chi_U}."""
    run = load_run(**kw)
    if not isinstance(run.model, TreeModel):
        raise DomainError('limsup runs on free-group models')
    U_set, V_set = run.boundary_set(U), run.boundary_set(V)
    rows = []
    for t in run.t_values:
        left, right = rep_ops.limsup_bound(run.model, U_set, V_set, a, t, t0, dual)
        rows.append({'t': t, 'left': left, 'right': right})
    write_result('limsup', ['t', 'left', 'right'], rows, run.config)


@representation_bp.cli.command('rank')
@run_options()
@click.option('--n', 'n', type=int, default=1, show_default=True,
              help='compression depth')
@click.option('--L', 'max_length', type=int, default=6, show_default=True)
@experiment
def rank(n, max_length, **kw):
    """Rank of the compressed operators P_n rho(gamma) P_n, |gamma| <= L."""
    run = load_run(**kw)
    if not isinstance(run.model, TreeModel):
        raise DomainError('rank runs on free-group models')
    sweep = rep_ops.rank_sweep(run.model, n, max_length)
    full = (2 * run.model.rank * run.model.m ** (n - 1)) ** 2
    rows = [{'L': L, 'rank': r, 'full': full} for L, r in sweep]
    write_result('rank', ['L', 'rank', 'full'], rows, run.config)
