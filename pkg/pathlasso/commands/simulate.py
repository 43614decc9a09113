"""
simulate: draw replicate datasets and their truth records.
"""
import logging
import os

import click

from pathlasso.commands import run_command, shared_defaults, shared_options
from pathlasso.models import Treatment
from pathlasso.services.simulation import simulate_replicates
from pathlasso.utils.storage import write_dataset, write_truth
from pathlasso.utils.validators import validate_enum, validate_positive_integer

logger = logging.getLogger(__name__)


def replicate_stem(index):
    return f'rep{index:03d}'


@click.command()
@click.option('--n', type=int, default=None, help='Observations per dataset')
@click.option('--k', type=int, default=None, help='Number of mediators')
@click.option('--rho-m', type=float, default=None, help='Correlation of the paired mediator errors')
@click.option('--reps', type=int, default=None, help='Number of replicates')
@click.option('--treatment', type=click.Choice([t.value for t in Treatment]), default=None)
@click.option('--delta-density', type=float, default=None,
              help='Share of nonzero mediator-to-mediator effects (sequential model when > 0)')
@click.option('--delta-value', type=float, default=None, help='Value of each nonzero mediator-to-mediator effect')
@shared_options
@click.pass_context
def simulate(ctx, **flags):
    """
    Write rep<i>_dataset.csv and rep<i>_truth.json for each replicate.
    """
    config = ctx.obj['config']
    defaults = {
        **shared_defaults(config, 'simulated'),
        'n': 50,
        'k': 50,
        'rho_m': 0.0,
        'reps': 1,
        'treatment': Treatment.normal.value,
        'delta_density': 0.0,
        'delta_value': 0.0,
    }

    def body(run_config, output_dir):
        reps = validate_positive_integer(run_config['reps'], 'reps')
        treatment = validate_enum(run_config['treatment'], Treatment, 'treatment')
        replicates = simulate_replicates(
            n=run_config['n'],
            k=run_config['k'],
            rho_m=run_config['rho_m'],
            reps=reps,
            seed=run_config['seed'],
            treatment=treatment,
            delta_density=run_config['delta_density'],
            delta_value=run_config['delta_value'],
            threads=run_config['threads'],
        )
        files = []
        for index, (dataset, truth) in enumerate(replicates, start=1):
            stem = os.path.join(output_dir, replicate_stem(index))
            write_dataset(dataset, f'{stem}_dataset.csv')
            write_truth(truth, f'{stem}_truth.json')
            files.append({'dataset': f'{stem}_dataset.csv', 'truth': f'{stem}_truth.json',
                          'true_set': sorted(truth.true_set)})
        logger.info('wrote %d replicates to %s', reps, output_dir)
        return {'output_dir': output_dir, 'replicates': files}, None

    run_command(ctx, 'simulate', defaults, flags, body)
