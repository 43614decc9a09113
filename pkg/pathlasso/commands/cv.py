"""
cv: cross-validated choice of the tuning grid point and the selected pathways
at that point.
"""
import logging
import os

import click
import pandas as pd

from pathlasso.commands import (
    PATH_METHODS, convergence_warning, grid_defaults, grid_from, grid_options, path_label, path_method,
    run_command, shared_defaults, shared_options, solver_defaults, solver_from, solver_options,
)
from pathlasso.models import Method
from pathlasso.services.core import standardize
from pathlasso.services.evaluation import cross_validate, fit_method_path, select_pathways
from pathlasso.utils.storage import coefficient_frame, read_dataset, write_json, write_table
from pathlasso.utils.validators import validate_required_fields

logger = logging.getLogger(__name__)


def cv_frame(report, full):
    """
    One row per grid spec with its mean held-out loss; the chosen row is
    marked. converged refers to the full-data fit, folds_converged counts
    the fold fits that converged.
    """
    rows = []
    for i, spec in enumerate(report.grid):
        rows.append({
            'lambda': spec.lam,
            'omega': spec.omega,
            'phi': spec.phi,
            'converged': full.fits[i].converged,
            'folds_converged': int(report.fold_converged[i].sum()),
            'mean_loss': float(report.mean_loss[i]),
            **{f'fold{f + 1}': float(v) for f, v in enumerate(report.fold_losses[i])},
            'chosen': i == report.chosen,
        })
    return pd.DataFrame(rows)


@click.command()
@click.option('--input', '-i', 'input_path', default=None, help='Dataset CSV')
@click.option('--method', type=click.Choice(PATH_METHODS), default=None)
@click.option('--folds', type=int, default=None, help='Number of folds')
@grid_options
@solver_options
@shared_options
@click.pass_context
def cv(ctx, **flags):
    """Cross-validate the grid and write the pathways selected at the chosen point."""
    config = ctx.obj['config']
    defaults = {
        **shared_defaults(config, 'cv'),
        **solver_defaults(config),
        **grid_defaults(config),
        'input_path': None,
        'method': Method.pathlasso.name,
        'folds': config.CV_FOLDS,
    }

    def body(run_config, output_dir):
        validate_required_fields(run_config.params, ['input_path'])
        method = path_method(run_config['method'])
        dataset = standardize(read_dataset(run_config['input_path']))
        specs = grid_from(run_config, method)
        opts = solver_from(run_config)

        report = cross_validate(dataset, specs, folds=run_config['folds'], seed=run_config['seed'],
                                opts=opts, threads=run_config['threads'], method=method)
        full = fit_method_path(dataset, specs, method, opts, cutoff=run_config['cutoff'],
                               label=path_label(method, run_config['omega_rule']))
        chosen = full.fits[report.chosen]
        selection = select_pathways(chosen.coefs.ab, run_config['cutoff'], source=full.label)

        write_table(cv_frame(report, full), os.path.join(output_dir, 'cv.csv'))
        write_json(report, os.path.join(output_dir, 'cv_report.json'))
        coefficients = coefficient_frame(chosen.coefs, dataset.column_names)
        write_table(coefficients, os.path.join(output_dir, 'coefficients.csv'))
        selected = coefficients[coefficients['mediator'].isin(selection.selected)]
        write_table(selected, os.path.join(output_dir, 'selected.csv'))

        logger.info('chose grid point %d of %d; %d pathways selected',
                    report.chosen + 1, len(specs), len(selection))
        data = {
            'chosen': report.chosen,
            'chosen_spec': report.chosen_spec,
            'selected': selection,
            'output_dir': output_dir,
        }
        fold_failures = [{'stage': f"fold{row['fold']}", 'lambda': row['lambda'], 'omega': row['omega']}
                         for row in report.unconverged]
        return data, convergence_warning(full.fits, fold_failures, report.fold_converged.size)

    run_command(ctx, 'cv', defaults, flags, body)
