import math

import click
import numpy as np
from flask import Blueprint

from commands.common import experiment, load_run, run_options
from commands.export import write_result
from hyperrep import core, measure_lab, rep_ops
from hyperrep.plane import PlaneModel, lambda_plane
from hyperrep.tree import TreeModel
from hyperrep.words import ReducedWord

measure_bp = Blueprint('measure', __name__, cli_group=None)


def decreasing_functions():
    """Positive decreasing functions of u = sigma^eta used by the integral checks."""
    return {
        'inverse': lambda u: 1 / u,
        'inverse-sqrt': lambda u: u ** -0.5,
        'log': lambda u: 1 - math.log(u),
        'exp': lambda u: math.exp(-u),
    }


@measure_bp.cli.command('regularity')
@run_options()
@click.option('--centres', type=int, default=64, show_default=True)
@click.option('--cases', type=int, default=200, show_default=True,
              help='randomized integral-bound cases')
@experiment
def regularity(centres, cases, **kw):
    """eta-regularity certificate plus the shell-integral and logarithmic bounds."""
    run = load_run(**kw)
    model = run.model
    rng = np.random.default_rng(run.config.seed)
    centre_points = model.random_boundary(rng, centres)
    grid = measure_lab.default_radius_grid(model, depth=min(10, run.config.depth))
    cert = measure_lab.certify_regularity(model, grid, centre_points)
    funcs = decreasing_functions()
    names = sorted(funcs)
    diam = model.boundary_diameter()
    for i in range(cases):
        name = names[i % len(names)]
        s, t = sorted(rng.uniform(1e-3, diam, 2))
        if t - s < 1e-6:
            continue
        b = centre_points[i % len(centre_points)]
        measure_lab.decreasing_integral_bounds(model, funcs[name], b, s, t,
                                               n_samples=20_000, seed=i)
        measure_lab.int_as_log_bounds(model, s=s)
    row = {'eta': cert.eta, 'k': cert.k, 'kprime': cert.kprime,
           'worst_ratio_low': cert.worst_ratio_low,
           'worst_ratio_high': cert.worst_ratio_high,
           'integral_cases': cases, 'samples': cert.samples}
    write_result('regularity', list(row), [row], run.config)


@measure_bp.cli.command('sampling')
@run_options(default_t='2..6')
@experiment
def sampling(**kw):
    """Sampling sets S_t and the sandwich for lambda^q test functions."""
    run = load_run(**kw)
    model = run.model
    rng = np.random.default_rng(run.config.seed)
    L = model.eta * (2 * model.radius + 3 * model.delta)
    rows = []
    for t in run.t_values:
        t = float(t)
        if isinstance(model, PlaneModel):
            run.need_cache(t + model.radius + 3 * model.radius + 4 * model.delta)
        S = measure_lab.build_sampling_set(model, t, rng, n_check=500)
        if isinstance(model, TreeModel):
            n = max(1, int(t))
            q = model.word(''.join('ab'[i % 2] for i in range(n)))
            f = lambda b, q=q: model.lambda_exact(q, b)
            integral = rep_ops.lambda_l1(model, q)
        else:
            q = complex(math.tanh(t / 4))
            f = lambda b, q=q: float(lambda_plane(q, np.array([b.angle]))[0])
            integral = rep_ops.lambda_l1(model, q)
        estimate, C_L = measure_lab.sampled_integral(f, S, L, integral, rng=rng)
        rows.append({'t': t, 's_t_size': len(S), 'radius': S.radius,
                     'min_cover': S.checked['min_count'],
                     'max_cover': S.checked['max_count'],
                     'multiplicity': S.multiplicity, 'estimate': estimate,
                     'integral': integral, 'C_L': C_L})
    write_result('sampling', list(rows[0]) if rows else ['t'], rows, run.config)


@measure_bp.cli.command('comparison')
@run_options()
@click.option('--samples', type=int, default=500, show_default=True)
@experiment
def comparison(samples, **kw):
    """Chopped-product comparison, shadow cones and the (hyp) audit."""
    run = load_run(**kw)
    model = run.model
    rng = np.random.default_rng(run.config.seed)
    qs = model.random_points(rng, samples, 6.0)
    bs = model.random_boundary(rng, samples)
    pairs = [(q, b) for q, b in zip(qs, bs) if model.norm(q) > 0]
    checked = core.check_comparison(model, pairs)
    cones = 0
    for q in qs[:8]:
        if model.norm(q) > 0:
            cones += core.shadow_comparison_check(model, q, rng, n=50)['inner_checked']
    worst = core.certify_hyperbolicity(model, rng, n=samples)
    centres = [q for q in qs[:40] if model.norm(q) > 0
               and (not isinstance(model, TreeModel) or isinstance(q, ReducedWord))]
    shadows = measure_lab.shadow_measure_bounds(model, centres)
    rows = [
        {'check': 'comparison', 'value': checked},
        {'check': 'shadow-cone-points', 'value': cones},
        {'check': 'hyperbolicity-defect', 'value': worst},
        {'check': 'shadow-measure-infimum', 'value': shadows['infimum']},
    ]
    write_result('comparison', ['check', 'value'], rows, run.config)
