"""
Shared plumbing for the command modules: common flags, logging setup,
configuration merging and the exit-code contract.
"""
import logging
import sys

import click

from pathlasso.config import Config
from pathlasso.models import Method, OmegaRule, RunConfig, SolverOptions
from pathlasso.services.admm import build_grid, build_omega_grid
from pathlasso.services.evaluation import unconverged_fits
from pathlasso.utils.responses import exception_response, success_response, warning_response
from pathlasso.utils.storage import ensure_output_dir, write_config
from pathlasso.utils.validators import validate_enum

LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR']
PATH_METHODS = [Method.pathlasso.name, Method.tslasso.name]


def _stack(options):
    def decorator(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn
    return decorator


shared_options = _stack([
    click.option('--output-dir', '-o', default=None, help='Directory for output files'),
    click.option('--seed', type=int, default=None, help='Seed for every random stream'),
    click.option('--threads', type=int, default=None, help='Parallel workers'),
    click.option('--config', 'config_file', default=None, help='JSON file of parameter overrides'),
    click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None),
])

solver_options = _stack([
    click.option('--max-iter', type=int, default=None, help='ADMM sweep limit per grid point'),
    click.option('--rho', type=float, default=None, help='Augmented-Lagrangian parameter'),
    click.option('--tol-primal', type=float, default=None, help='Primal residual tolerance'),
    click.option('--tol-change', type=float, default=None, help='Iterate change tolerance'),
    click.option('--cutoff', type=float, default=None, help='Selection cutoff on |a_j b_j|'),
])

grid_options = _stack([
    click.option('--lambda-min', type=float, default=None),
    click.option('--lambda-max', type=float, default=None),
    click.option('--n-lambda', type=int, default=None, help='Grid points'),
    click.option('--omega-rule', type=click.Choice([r.value for r in OmegaRule]), default=None),
    click.option('--omega', type=float, default=None, help='l1 strength for --omega-rule fixed'),
    click.option('--phi', type=float, default=None),
    click.option('--w2', type=float, default=None, help='Outcome-equation loss weight'),
])


def shared_defaults(config, output_dir):
    return {'output_dir': output_dir, 'seed': 0, 'threads': config.THREADS}


def solver_defaults(config):
    return {
        'max_iter': config.MAX_ITER,
        'rho': config.RHO,
        'tol_primal': config.TOL_PRIMAL,
        'tol_change': config.TOL_CHANGE,
        'cutoff': config.SELECTION_CUTOFF,
    }


def grid_defaults(config):
    return {
        'lambda_min': config.LAMBDA_MIN,
        'lambda_max': config.LAMBDA_MAX,
        'n_lambda': config.N_LAMBDA,
        'omega_rule': OmegaRule.zero.value,
        'omega': 0.0,
        'phi': config.PHI,
        'w2': 1.0,
    }


def solver_from(run_config):
    return SolverOptions(
        max_iter=run_config['max_iter'],
        tol_primal=run_config['tol_primal'],
        tol_change=run_config['tol_change'],
        rho=run_config['rho'],
    )


def grid_from(run_config, method=Method.pathlasso, omega_rule=None):
    """Decreasing tuning grid: lambda for PathLasso, omega (lambda = 0) for TSLasso."""
    if Method(method) is Method.tslasso:
        return build_omega_grid(run_config['lambda_min'], run_config['lambda_max'], run_config['n_lambda'],
                                phi=run_config['phi'], w2=run_config['w2'])
    return build_grid(
        run_config['lambda_min'], run_config['lambda_max'], run_config['n_lambda'],
        omega_rule=omega_rule or run_config['omega_rule'], omega=run_config['omega'],
        phi=run_config['phi'], w2=run_config['w2'],
    )


def configure_logging(level):
    logging.basicConfig(
        level=str(level).upper(),
        stream=sys.stderr,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        force=True,
    )


def run_command(ctx, name, defaults, flags, body):
    """
    Resolve the RunConfig, run body(run_config, output_dir) and exit.

    body returns (data, warning); a non-empty warning turns the envelope into
    success_with_warning. config.json is written to the output directory
    before the body runs.
    """
    config = (ctx.obj or {}).get('config', Config)
    flags = dict(flags)
    config_file = flags.pop('config_file', None)
    configure_logging(flags.pop('log_level', None) or config.LOG_LEVEL)

    try:
        run_config = RunConfig.resolve(name, defaults, flags, config_file)
        output_dir = ensure_output_dir(run_config['output_dir'])
        write_config(run_config, output_dir)
        data, warning = body(run_config, output_dir)
    except Exception as exc:
        ctx.exit(exception_response(exc))

    if warning:
        ctx.exit(warning_response(data, warning))
    ctx.exit(success_response(data))


def convergence_warning(fits=(), failures=(), total=0):
    """
    Warning envelope for non-converged fits, or None.

    fits are FitResults checked here; failures and total are unconverged
    records and the fit count gathered elsewhere (fold fits, compare).
    """
    failed = unconverged_fits(fits) + list(failures)
    if not failed:
        return None
    return {
        'code': 'NOT_CONVERGED',
        'message': f'{len(failed)} of {len(fits) + total} fits reached max_iter before converging',
        'details': failed,
    }


def path_method(name):
    """Method for a path-fitting command: pathlasso or tslasso."""
    return validate_enum(name, Method, 'method', allowed=(Method.pathlasso, Method.tslasso))


def path_label(method, omega_rule):
    if method is Method.tslasso:
        return Method.tslasso.value
    return f'{Method.pathlasso.value}(omega={omega_rule})'
