"""
fit / path: single-spec fits and warm-started regularization paths.
"""
import logging
import os

import click
import pandas as pd

from pathlasso.commands import (
    PATH_METHODS, convergence_warning, grid_defaults, grid_from, grid_options, path_label, path_method,
    run_command, shared_defaults, shared_options, solver_defaults, solver_from, solver_options,
)
from pathlasso.models import Method, PenaltySpec
from pathlasso.services.admm import fit as fit_spec
from pathlasso.services.admm import prox_audit
from pathlasso.services.core import back_transform, standardize
from pathlasso.services.evaluation import fit_method_path, select_pathways
from pathlasso.utils.storage import (
    coefficient_frame, fit_row, path_frame, read_dataset, write_json, write_table,
)
from pathlasso.utils.validators import validate_required_fields

logger = logging.getLogger(__name__)


@click.command()
@click.option('--input', '-i', 'input_path', default=None, help='Dataset CSV')
@click.option('--lambda', 'lam', type=float, default=None, help='Product-penalty strength')
@click.option('--omega', type=float, default=None, help='l1 strength')
@click.option('--phi', type=float, default=None)
@click.option('--w2', type=float, default=None, help='Outcome-equation loss weight')
@click.option('--raw-scale/--no-raw-scale', default=None, help='Also report coefficients on the raw data scale')
@click.option('--prox-audit/--no-prox-audit', default=None, help='Write the pairwise subproblems of the final state')
@solver_options
@shared_options
@click.pass_context
def fit(ctx, **flags):
    """Fit one (lambda, omega, phi) point; lambda = 0 is the two-stage lasso."""
    config = ctx.obj['config']
    defaults = {
        **shared_defaults(config, 'fit'),
        **solver_defaults(config),
        'input_path': None,
        'lam': None,
        'omega': 0.0,
        'phi': config.PHI,
        'w2': 1.0,
        'raw_scale': False,
        'prox_audit': False,
    }

    def body(run_config, output_dir):
        validate_required_fields(run_config.params, ['input_path', 'lam'])
        dataset = standardize(read_dataset(run_config['input_path']))
        spec = PenaltySpec(lam=run_config['lam'], phi=run_config['phi'], omega=run_config['omega'],
                           w2=run_config['w2'])
        result = fit_spec(dataset, spec, solver_from(run_config))
        selection = select_pathways(result.coefs.ab, run_config['cutoff'])

        write_table(pd.DataFrame([fit_row(result, dataset.column_names)]), os.path.join(output_dir, 'fit.csv'))
        summary = {
            'fit': result,
            'selected': sorted(selection.selected),
            'cutoff': selection.cutoff,
            'standardization': dataset,
        }
        if run_config['raw_scale']:
            raw = back_transform(result.coefs, dataset)
            write_table(coefficient_frame(raw, dataset.column_names), os.path.join(output_dir, 'fit_raw.csv'))
            summary['raw_scale'] = raw
        if run_config['prox_audit']:
            write_table(prox_audit(result.state, spec), os.path.join(output_dir, 'prox_audit.csv'))
        write_json(summary, os.path.join(output_dir, 'fit.json'))
        return summary, convergence_warning([result])

    run_command(ctx, 'fit', defaults, flags, body)


@click.command()
@click.option('--input', '-i', 'input_path', default=None, help='Dataset CSV')
@click.option('--method', type=click.Choice(PATH_METHODS), default=None,
              help='pathlasso walks lambda; tslasso walks omega with lambda = 0')
@click.option('--warm-start/--cold-start', default=None)
@grid_options
@solver_options
@shared_options
@click.pass_context
def path(ctx, **flags):
    """Fit a log-spaced tuning grid from the largest value down."""
    config = ctx.obj['config']
    defaults = {
        **shared_defaults(config, 'path'),
        **solver_defaults(config),
        **grid_defaults(config),
        'input_path': None,
        'method': Method.pathlasso.name,
        'warm_start': True,
    }

    def body(run_config, output_dir):
        validate_required_fields(run_config.params, ['input_path'])
        method = path_method(run_config['method'])
        dataset = standardize(read_dataset(run_config['input_path']))
        specs = grid_from(run_config, method)
        result = fit_method_path(dataset, specs, method, solver_from(run_config), warm_start=run_config['warm_start'],
                                 cutoff=run_config['cutoff'], label=path_label(method, run_config['omega_rule']))

        write_table(path_frame(result), os.path.join(output_dir, 'path.csv'))
        write_json(result, os.path.join(output_dir, 'path.json'))
        logger.info('path of %d points written to %s', len(result), output_dir)
        return result, convergence_warning(result.fits)

    run_command(ctx, 'path', defaults, flags, body)

