import sys

import click
import numpy as np
from flask import Blueprint, current_app

from commands.common import experiment, load_run, run_options
from commands.export import write_result
from hyperrep import core, counting, measure_lab, rep_ops, spectra
from hyperrep.errors import CertificationError
from hyperrep.plane import PlaneModel
from hyperrep.tree import CylinderSet, TreeModel
from hyperrep.words import ReducedWord
from models import attach_cache
from utils import notify

selftest_bp = Blueprint('selftest', __name__, cli_group=None)


def _require(condition, message, witness=None):
    if not condition:
        raise CertificationError(message, witness)


def check_coefficients(model, rng, full, threads=1):
    max_len = 12 if full else 8
    one = rep_ops.CylinderFunction.constant(model)
    checked = 0
    for n in range(max_len + 1):
        for _ in range(3):
            w = model.random_word(rng, n)
            value = rep_ops.matrix_coefficient(model, w, one, one)
            _require(value == rep_ops.lambda_shell_sum(model, n),
                     'streamed coefficient differs from the shell sum', w)
            _require(value == rep_ops.lambda_l1_closed_form(model, n),
                     'shell sum differs from the closed form', n)
            checked += 1
    return '%d words up to length %d' % (checked, max_len)


def check_lambda_window(model, rng, full, threads=1):
    low, high = rep_ops.lambda_estimation_window(model, range(1, 21))
    _require(0.45 <= low and high <= 1.6, 'lambda ratio leaves [0.45, 1.6]',
             (low, high))
    return 'ratios in [%.6f, %.6f]' % (low, high)


def check_bounded(model, rng, full, threads=1):
    values = [rep_ops.sup_norm_Tt1(model, t) for t in range(1, 13)]
    _require(max(values) <= 1 + 1e-12, 'sup norm exceeds 1', max(values))
    pts = model.random_boundary(rng, 4)
    direct = rep_ops.tree_sup_norm_direct(model, 3, pts)
    _require(direct == values[2], 'aggregated and direct sums differ', str(direct))
    return 'max over t=1..12 is %s' % max(values)


def check_convergence(model, rng, full, threads=1):
    U = CylinderSet.cylinder(model, 'a')
    V = CylinderSet.cylinder(model, 'b')
    t_max = 12 if full else 7
    rows = rep_ops.convergence_experiment(model, U, V, U, range(2, t_max + 1),
                                          threads=threads)
    slope = rep_ops.certify_convergence(
        rows, slope_range=(-1.6, -0.4) if full else None)
    detail = 'final error %.6g at t=%d' % (rows[-1].abs_error, t_max)
    if full:
        detail += ', slope %.4f' % slope
    total = rep_ops.sign_pattern_sum(model, U, V, U, 3, threads)
    _require(total == 1, 'complement patterns do not sum to 1', str(total))
    return detail


def check_equidistribution(model, rng, full, threads=1):
    cells = [CylinderSet.cylinder(model, x) for x in ('a', 'b', 'A', 'B')]
    t_top = 12 if full else 8
    worst = 0.0
    for U in cells:
        for V in cells:
            for t in range(1, t_top + 1):
                counting.equidistribution(model, U, V, t, threads=threads)
            freq = counting.equidistribution(model, U, V, 10 if full else t_top,
                                             threads=threads)
            worst = max(worst, abs(float(freq) - 1 / 16))
    if full:
        _require(worst <= 1e-3, 'equidistribution error above 1e-3', worst)
    return 'worst error %.6g, transfer oracle exact up to t=%d' % (worst, t_top)


def check_regularity(model, rng, full, threads=1):
    centres = model.random_boundary(rng, 32)
    cert = measure_lab.certify_regularity(model,
                                          measure_lab.default_radius_grid(model),
                                          centres)
    _require((cert.k, cert.kprime) == (0.25, 0.75), 'unexpected constants',
             (cert.k, cert.kprime))
    cases = 1000 if full else 100
    for i in range(cases):
        s, t = sorted(rng.uniform(1e-3, 1.0, 2))
        alpha = float(rng.uniform(0.1, 1.5))
        measure_lab.decreasing_integral_bounds(model, lambda u, a=alpha: u ** -a,
                                               centres[i % len(centres)], s, t)
        measure_lab.int_as_log_bounds(model, s=s)
    t_top = 10 if full else 6
    pairs = 0
    for t in range(1, t_top + 1):
        for n in range(1, t + 1):
            q = ReducedWord(model.random_word(rng, n), model.edge)
            measure_lab.lambda_average_check(model, q, t)
            pairs += 1
    return 'k=1/4 kprime=3/4; %d integral cases; %d sampling pairs' % (cases, pairs)


def check_rank(model, rng, full, threads=1):
    sweep = rep_ops.rank_sweep(model, 1, 6)
    full_at = [L for L, r in sweep if r == 16]
    _require(full_at, 'depth-1 compressions never reach rank 16', sweep)
    detail = 'depth 1 full rank at L=%d' % full_at[0]
    if full:
        sweep2 = rep_ops.rank_sweep(model, 2, 6)
        ranks = [r for _, r in sweep2]
        _require(all(a <= b for a, b in zip(ranks, ranks[1:])),
                 'depth-2 ranks decrease with L', sweep2)
        _require(ranks[-1] == 144, 'depth-2 compressions stop short of rank 144',
                 sweep2)
        detail += '; depth 2 full rank 144 at L=%d' % next(
            L for L, r in sweep2 if r == 144)
    return detail


def check_rescaling(model, rng, full, threads=1):
    one = rep_ops.CylinderFunction.constant(model)
    a = rep_ops.CylinderFunction.indicator(CylinderSet.cylinder(model, 'a'))
    b = rep_ops.CylinderFunction.indicator(CylinderSet.cylinder(model, 'b'))
    words = ['ab', 'aBA', 'abAB', 'b', 'aab']
    for c in (2, '3/2'):
        spectra.rescaling_invariance_check(model, c, words, [(one, one), (a, b)])
    audited = spectra.class_function_audit(model, rng, 1000 if full else 100)
    pts = model.random_boundary(rng, 8)
    gammas = [model.word(x) for x in ('a', 'bA', 'abb')]
    rep_ops.intertwiner_check(model, model.word('ab'), gammas, [a, b], pts)
    return 'c in {2, 3/2}; %d class-function cases' % audited


def hyperbolicity_margin(model, rng, n, warn_below=0.1):
    """Audited defect and its relative distance below delta."""
    worst = core.certify_hyperbolicity(model, rng, n=n)
    headroom = (model.delta - worst) / model.delta
    log = current_app.logger.warning if headroom < warn_below else current_app.logger.info
    log('hyperbolicity defect %.6g is %.1f%% below delta %.6g',
        worst, 100 * headroom, model.delta)
    return worst, headroom


def check_plane(model, rng, full, threads=1):
    attach_cache(model, 12.5, current_app.config)
    slope, _ = counting.growth_exponent(model, [8, 9, 10, 11, 12])
    _require(0.9 <= slope <= 1.1, 'plane growth exponent outside [0.9, 1.1]', slope)
    fits = [counting.margulis_fit(model, U, V, 0.5, [8, 9, 10, 11])
            for U, V in counting.arc_pairs()]
    spread = counting.check_margulis_agreement(fits)
    values = [rep_ops.sup_norm_Tt1(model, t, n_angles=64) for t in range(6, 11)]
    _require(max(values) / min(values) < 3, 'sampled sup norms spread', values)
    worst, headroom = hyperbolicity_margin(model, rng, 10_000 if full else 2000)
    samples = [(b, *model.random_points(rng, 3, 6.0))
               for b in model.random_boundary(rng, 10_000 if full else 1000)]
    residual = core.cocycle_residual(model, samples)
    _require(residual <= current_app.config['GEOMETRIC_TOL'],
             'Busemann cocycle residual too large', residual)
    return ('eta_hat %.4f; Margulis spread %.4f; hyperbolicity defect %.4f '
            '(headroom %.1f%%)' % (slope, spread, worst, 100 * headroom))


TREE_CHECKS = [
    ('coefficient-oracle', check_coefficients),
    ('lambda-window', check_lambda_window),
    ('bounded', check_bounded),
    ('measure-convergence', check_convergence),
    ('equidistribution', check_equidistribution),
    ('regularity-and-sampling', check_regularity),
    ('truncation-rank', check_rank),
    ('rescaling', check_rescaling),
]


@selftest_bp.cli.command('selftest')
@run_options()
@click.option('--full', is_flag=True, help='acceptance scale (slow)')
@click.option('--plane', is_flag=True, help='include the genus-2 checks')
@experiment
def selftest(full, plane, **kw):
    """Run the acceptance checks and report one row per check."""
    run = load_run(**kw)
    # the acceptance constants are those of the rank-2 tree
    tree = TreeModel(2, 1, run.config.depth)
    checks = [(name, fn, tree) for name, fn in TREE_CHECKS]
    if plane:
        checks.append(('plane', check_plane, PlaneModel('genus2')))
    rows = []
    failed = 0
    for name, fn, model in checks:
        rng = np.random.default_rng(run.config.seed)
        try:
            detail = fn(model, rng, full, run.config.threads)
            status = 'pass'
        except CertificationError as exc:
            detail = str(exc)
            status = 'fail'
            failed += 1
        rows.append({'check': name, 'status': status, 'detail': detail})
        current_app.logger.info('%s: %s', name, status)
    write_result('selftest', ['check', 'status', 'detail'], rows, run.config)
    if failed:
        notify('%d check(s) failed' % failed, 'danger')
        sys.exit(1)
    notify('all %d checks passed' % len(rows), 'success')
