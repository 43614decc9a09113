"""
refit: unpenalized refit of a selection with bootstrap intervals.
"""
import os

import click
import pandas as pd

from pathlasso.commands import run_command, shared_defaults, shared_options
from pathlasso.services.core import standardize
from pathlasso.services.refit import bootstrap_ci
from pathlasso.utils.storage import read_dataset, read_selected, write_json, write_table
from pathlasso.utils.validators import validate_required_fields

REFIT_COLUMNS = ['pathway', 'ab_refit', 'ci_low', 'ci_high', 'significant', 'proportion_mediated',
                 'covers_estimate']


@click.command()
@click.option('--input', '-i', 'input_path', default=None, help='Dataset CSV')
@click.option('--selected', 'selected_path', default=None,
              help='CSV with a mediator column of 1-based indices (selected.csv from cv)')
@click.option('--resamples', type=int, default=None, help='Bootstrap resamples')
@click.option('--level', type=float, default=None, help='Interval level')
@shared_options
@click.pass_context
def refit(ctx, **flags):
    """Refit the selected pathways without penalty and bootstrap their effects."""
    config = ctx.obj['config']
    defaults = {
        **shared_defaults(config, 'refit'),
        'input_path': None,
        'selected_path': None,
        'resamples': config.RESAMPLES,
        'level': 0.95,
    }

    def body(run_config, output_dir):
        validate_required_fields(run_config.params, ['input_path', 'selected_path'])
        dataset = standardize(read_dataset(run_config['input_path']))
        selected = read_selected(run_config['selected_path'])
        report = bootstrap_ci(dataset, selected, resamples=run_config['resamples'], level=run_config['level'],
                              seed=run_config['seed'], threads=run_config['threads'])

        frame = pd.DataFrame([p.to_dict() for p in report.pathways], columns=REFIT_COLUMNS)
        write_table(frame, os.path.join(output_dir, 'refit.csv'))
        write_json(report, os.path.join(output_dir, 'refit.json'))
        warning = None
        if report.degenerate_resamples:
            warning = {
                'code': 'DEGENERATE_RESAMPLES',
                'message': f'{report.degenerate_resamples} degenerate resamples were redrawn',
            }
        return report, warning

    run_command(ctx, 'refit', defaults, flags, body)
