"""
Simulation study: accuracy of every method as the error correlation rho_m
varies, PathLasso AUC as phi varies, and the paired PathLasso vs TSLasso
comparison at the CV-chosen points.
"""
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import click
import pandas as pd

from pathlasso.models import Method, OmegaRule, SolverOptions
from pathlasso.services.admm import build_grid, fit_path
from pathlasso.services.core import standardize
from pathlasso.services.evaluation import compare_methods, method_grids, roc_curve, summarize
from pathlasso.services.simulation import simulate_replicates

PATHLASSO_ZERO = f'{Method.pathlasso.value}(omega={OmegaRule.zero.value})'


def rho_sweep(n, k, reps, seed, rhos, n_lambda, folds, threads):
    """Per-replicate (method, metric, value) records for each rho_m."""
    plan = method_grids(n_lambda=n_lambda)
    opts = SolverOptions()
    records = []
    for rho in rhos:
        print(f"rho_m = {rho}: {reps} replicates...")
        replicates = simulate_replicates(n, k, rho_m=rho, reps=reps, seed=seed, threads=threads)
        for replicate, (dataset, truth) in enumerate(replicates, start=1):
            result = compare_methods(standardize(dataset), truth, plan, opts=opts, folds=folds,
                                     seed=seed, threads=threads)
            frame = result['records']
            frame.insert(0, 'replicate', replicate)
            frame.insert(0, 'rho_m', rho)
            records.append(frame)
    return pd.concat(records, ignore_index=True)


def phi_sweep(n, k, reps, seed, phis, n_lambda, threads):
    """PathLasso (omega = 0) AUC per phi and replicate."""
    opts = SolverOptions()
    rows = []
    replicates = simulate_replicates(n, k, reps=reps, seed=seed, threads=threads)
    for phi in phis:
        print(f"phi = {phi}: fitting {reps} paths...")
        specs = build_grid(n_lambda=n_lambda, phi=phi)
        for replicate, (dataset, truth) in enumerate(replicates, start=1):
            path = fit_path(standardize(dataset), specs, opts)
            rows.append({'phi': phi, 'replicate': replicate, 'auc': roc_curve(path, truth.true_set).auc})
    return pd.DataFrame(rows)


def paired_comparison(records):
    """
    PathLasso (omega = 0) against TSLasso at rho_m = 0: F1 ratio of the means
    and the share of replicates where PathLasso has the lower MSE.
    """
    base = records[records['rho_m'] == 0.0]
    wide = base.pivot_table(index=['replicate'], columns=['method', 'metric'], values='value')
    if (PATHLASSO_ZERO, 'mse') not in wide.columns:
        return None
    f1_ratio = wide[(PATHLASSO_ZERO, 'f1')].mean() / wide[(Method.tslasso.value, 'f1')].mean()
    mse_wins = (wide[(PATHLASSO_ZERO, 'mse')] < wide[(Method.tslasso.value, 'mse')]).mean()
    return {'f1_ratio': float(f1_ratio), 'mse_win_share': float(mse_wins), 'replicates': len(wide)}


@click.command()
@click.option('--n', default=50, help='Observations per replicate')
@click.option('--k', default=50, help='Mediators')
@click.option('--reps', default=20, help='Replicates per setting')
@click.option('--seed', default=0)
@click.option('--n-lambda', default=20, help='Grid points per path')
@click.option('--folds', default=10, help='CV folds for tuned F1/MSE; 0 skips tuning')
@click.option('--threads', default=1)
@click.option('--output-dir', '-o', default='study')
def main(n, k, reps, seed, n_lambda, folds, threads, output_dir):
    """Run both sweeps and write rho_sweep.csv, phi_sweep.csv and their summaries."""
    os.makedirs(output_dir, exist_ok=True)

    rho_records = rho_sweep(n, k, reps, seed, [-0.4, 0.0, 0.4], n_lambda, folds, threads)
    rho_records.to_csv(os.path.join(output_dir, 'rho_sweep.csv'), index=False)
    rho_summary = pd.concat(
        [summarize(group).assign(rho_m=rho) for rho, group in rho_records.groupby('rho_m')],
        ignore_index=True,
    )
    rho_summary.to_csv(os.path.join(output_dir, 'rho_summary.csv'), index=False)

    phi_records = phi_sweep(n, k, reps, seed, [0.5, 1.0, 2.0, 5.0], n_lambda, threads)
    phi_records.to_csv(os.path.join(output_dir, 'phi_sweep.csv'), index=False)
    phi_summary = phi_records.groupby('phi')['auc'].agg(mean='mean', sd='std').reset_index()

    print("\n" + "=" * 50)
    print(f"Mean AUC by rho_m (n={n}, K={k}, {reps} replicates)")
    print("=" * 50)
    auc = rho_summary[rho_summary['metric'] == 'auc']
    print(auc.pivot(index='method', columns='rho_m', values='mean').round(3).to_string())

    print("\n" + "=" * 50)
    print("PathLasso AUC by phi")
    print("=" * 50)
    print(phi_summary.round(3).to_string(index=False))

    paired = paired_comparison(rho_records)
    if paired:
        print("\n" + "=" * 50)
        print("PathLasso(omega=zero) vs TSLasso at rho_m = 0")
        print("=" * 50)
        print(f"  F1 ratio of means:        {paired['f1_ratio']:.3f}")
        print(f"  Replicates with lower MSE: {paired['mse_win_share']:.0%} of {paired['replicates']}")


if __name__ == '__main__':
    main()
