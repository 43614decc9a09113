"""
compare: BK, TSLasso and PathLasso (omega = 0, 0.1 lambda, lambda) across
replicates, or two-run stability when no truth is available.
"""
import glob
import logging
import os

import click
import pandas as pd

from pathlasso.commands import (
    convergence_warning, grid_defaults, grid_options, run_command, shared_defaults, shared_options, solver_defaults,
    solver_from, solver_options,
)
from pathlasso.services.core import standardize
from pathlasso.services.evaluation import (
    compare_methods, compare_stability, method_grids, summarize,
)
from pathlasso.utils.storage import read_dataset, read_truth, write_table

logger = logging.getLogger(__name__)

DATASET_SUFFIX = '_dataset.csv'
TRUTH_SUFFIX = '_truth.json'


def expand_inputs(inputs):
    """Dataset files from the given paths; a directory contributes its *_dataset.csv files."""
    files = []
    for item in inputs:
        if os.path.isdir(item):
            files += sorted(glob.glob(os.path.join(item, f'*{DATASET_SUFFIX}')))
        else:
            files.append(item)
    return files


def truth_for(dataset_path):
    """Sibling truth JSON of a dataset written by simulate, or None."""
    if dataset_path.endswith(DATASET_SUFFIX):
        candidate = dataset_path[:-len(DATASET_SUFFIX)] + TRUTH_SUFFIX
        if os.path.exists(candidate):
            return candidate
    return None


def _with_replicate(frame, replicate):
    frame = frame.copy()
    frame.insert(0, 'replicate', replicate)
    return frame


@click.command()
@click.option('--input', '-i', 'inputs', multiple=True,
              help='Dataset CSV or directory of simulate output (repeatable)')
@click.option('--truth', 'truths', multiple=True, help='Truth JSON per dataset, in --input order (repeatable)')
@click.option('--folds', type=int, default=None, help='CV folds for tuned F1/MSE; 0 skips tuning')
@click.option('--fdr', type=float, default=None, help='BH level for BK selection')
@grid_options
@solver_options
@shared_options
@click.pass_context
def compare(ctx, **flags):
    """
    Accuracy mode writes roc_points.csv, auc.csv, metrics.csv,
    matched_f1.csv, matched_mse.csv, summary.csv and bk.csv. Without truth
    records and with exactly two datasets, stability mode writes
    stability.csv and stability_summary.csv.
    """
    config = ctx.obj['config']
    flags['inputs'] = list(flags['inputs']) or None
    flags['truths'] = list(flags['truths']) or None
    defaults = {
        **shared_defaults(config, 'compare'),
        **solver_defaults(config),
        **grid_defaults(config),
        'inputs': [],
        'truths': [],
        'folds': config.CV_FOLDS,
        'fdr': config.FDR_LEVEL,
    }

    def body(run_config, output_dir):
        datasets = expand_inputs(run_config['inputs'])
        if not datasets:
            raise ValueError('compare needs at least one dataset')
        truths = list(run_config['truths']) or [truth_for(path) for path in datasets]
        if len(truths) != len(datasets):
            raise ValueError(f'{len(truths)} truth files given for {len(datasets)} datasets')

        plan = method_grids(run_config['lambda_min'], run_config['lambda_max'], run_config['n_lambda'],
                            phi=run_config['phi'], w2=run_config['w2'])
        options = dict(opts=solver_from(run_config), cutoff=run_config['cutoff'], q=run_config['fdr'],
                       folds=run_config['folds'], seed=run_config['seed'], threads=run_config['threads'])

        if all(truth is None for truth in truths):
            if len(datasets) != 2:
                raise ValueError('truth JSON is required unless exactly two datasets are compared for stability')
            first, second = (standardize(read_dataset(path)) for path in datasets)
            per_grid, summary, convergence = compare_stability(first, second, plan, **options)
            write_table(per_grid, os.path.join(output_dir, 'stability.csv'))
            write_table(summary, os.path.join(output_dir, 'stability_summary.csv'))
            warning = convergence_warning(failures=convergence['unconverged'], total=convergence['fits'])
            return {'mode': 'stability', 'summary': summary.to_dict(orient='records')}, warning

        missing = [path for path, truth in zip(datasets, truths) if truth is None]
        if missing:
            raise ValueError(f'missing truth JSON for {", ".join(missing)}')

        outputs = {'roc': [], 'metrics': [], 'matched_f1': [], 'matched_mse': [], 'records': [], 'bk': []}
        failures, fit_count = [], 0
        for replicate, (data_path, truth_path) in enumerate(zip(datasets, truths), start=1):
            logger.info('replicate %d of %d: %s', replicate, len(datasets), data_path)
            result = compare_methods(standardize(read_dataset(data_path)), read_truth(truth_path), plan, **options)
            for key in outputs:
                outputs[key].append(_with_replicate(result[key], replicate))
            failures += [{'replicate': replicate, **row} for row in result['convergence']['unconverged']]
            fit_count += result['convergence']['fits']

        tables = {key: pd.concat(frames, ignore_index=True) for key, frames in outputs.items()}
        records = tables['records']
        summary = summarize(records)
        write_table(tables['roc'], os.path.join(output_dir, 'roc_points.csv'))
        write_table(records[records['metric'] == 'auc'].rename(columns={'value': 'auc'})
                    .drop(columns='metric'), os.path.join(output_dir, 'auc.csv'))
        write_table(tables['metrics'], os.path.join(output_dir, 'metrics.csv'))
        write_table(tables['matched_f1'], os.path.join(output_dir, 'matched_f1.csv'))
        write_table(tables['matched_mse'], os.path.join(output_dir, 'matched_mse.csv'))
        write_table(summary, os.path.join(output_dir, 'summary.csv'))
        write_table(tables['bk'], os.path.join(output_dir, 'bk.csv'))
        return {'mode': 'accuracy', 'replicates': len(datasets),
                'summary': summary.to_dict(orient='records')}, convergence_warning(failures=failures, total=fit_count)

    run_command(ctx, 'compare', defaults, flags, body)
