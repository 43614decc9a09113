"""
Tests for the command-line surface: envelopes, exit codes and output files.
"""
import json
import pytest
import sys
import os

import pandas as pd
from click.testing import CliRunner

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from pathlasso import create_cli
from pathlasso.commands.refit import REFIT_COLUMNS

SMALL_GRID = ['--lambda-min', '0.1', '--lambda-max', '10', '--n-lambda', '3', '--max-iter', '200']
STALLED_GRID = ['--lambda-min', '0.1', '--lambda-max', '10', '--n-lambda', '3', '--max-iter', '1']


@pytest.fixture
def cli():
    return create_cli()


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def simulated(cli, runner, tmp_path):
    """Two small replicates written by simulate."""
    out = tmp_path / 'sim'
    result = runner.invoke(cli, ['simulate', '--n', '20', '--k', '5', '--reps', '2', '--seed', '3', '-o', str(out)])
    assert result.exit_code == 0, result.stderr
    return out


def envelope(result):
    return json.loads(result.stdout)


def error_of(result):
    return json.loads(result.stderr)['error']


def test_help_lists_commands(cli, runner):
    result = runner.invoke(cli, ['--help'])
    assert result.exit_code == 0
    for name in ('simulate', 'fit', 'path', 'cv', 'compare', 'refit'):
        assert name in result.stdout


def test_simulate_writes_replicates(simulated):
    assert sorted(os.listdir(simulated)) == [
        'config.json', 'rep001_dataset.csv', 'rep001_truth.json', 'rep002_dataset.csv', 'rep002_truth.json',
    ]
    frame = pd.read_csv(simulated / 'rep001_dataset.csv')
    assert list(frame.columns) == ['Z', 'M1', 'M2', 'M3', 'M4', 'M5', 'R']
    assert len(frame) == 20
    truth = json.loads((simulated / 'rep001_truth.json').read_text())
    assert len(truth['true_set']) == 3


def test_simulate_is_reproducible(cli, runner, tmp_path):
    for name in ('first', 'second'):
        result = runner.invoke(cli, ['simulate', '--n', '15', '--k', '4', '--seed', '9', '-o', str(tmp_path / name)])
        assert result.exit_code == 0
        assert envelope(result)['status'] == 'success'
    first = (tmp_path / 'first' / 'rep001_dataset.csv').read_bytes()
    second = (tmp_path / 'second' / 'rep001_dataset.csv').read_bytes()
    assert first == second


def test_simulate_rejects_unit_correlation(cli, runner, tmp_path):
    result = runner.invoke(cli, ['simulate', '--rho-m', '1.5', '-o', str(tmp_path)])
    assert result.exit_code == 3
    assert error_of(result)['code'] == 'VALIDATION_ERROR'


def test_fit_missing_dataset(cli, runner, tmp_path):
    result = runner.invoke(cli, ['fit', '-i', str(tmp_path / 'absent.csv'), '--lambda', '1', '-o', str(tmp_path)])
    assert result.exit_code == 2
    assert error_of(result)['code'] == 'PARSE_ERROR'


def test_fit_malformed_dataset(cli, runner, tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text('Z,M1\n1,2\n2,3\n3,5\n')
    result = runner.invoke(cli, ['fit', '-i', str(path), '--lambda', '1', '-o', str(tmp_path / 'out')])
    assert result.exit_code == 2
    assert 'missing column' in error_of(result)['message']


def test_fit_requires_lambda(cli, runner, simulated, tmp_path):
    result = runner.invoke(cli, ['fit', '-i', str(simulated / 'rep001_dataset.csv'), '-o', str(tmp_path / 'out')])
    assert result.exit_code == 3
    assert 'lam' in error_of(result)['message']


def test_fit_two_stage_point(cli, runner, simulated, tmp_path):
    out = tmp_path / 'fit'
    result = runner.invoke(cli, [
        'fit', '-i', str(simulated / 'rep001_dataset.csv'), '--lambda', '0', '--omega', '0.5',
        '--raw-scale', '--prox-audit', '-o', str(out),
    ])
    assert result.exit_code == 0, result.stderr
    assert envelope(result)['status'] in ('success', 'success_with_warning')
    for name in ('fit.csv', 'fit.json', 'fit_raw.csv', 'prox_audit.csv', 'config.json'):
        assert (out / name).exists()
    row = pd.read_csv(out / 'fit.csv')
    assert row.loc[0, 'lambda'] == 0.0
    assert 'AB_M5' in row.columns
    assert len(pd.read_csv(out / 'prox_audit.csv')) == 6


def test_path_small_grid(cli, runner, simulated, tmp_path):
    out = tmp_path / 'path'
    result = runner.invoke(cli, ['path', '-i', str(simulated / 'rep001_dataset.csv'), *SMALL_GRID, '-o', str(out)])
    assert result.exit_code == 0, result.stderr
    table = pd.read_csv(out / 'path.csv')
    assert table['lambda'].tolist() == pytest.approx([10.0, 1.0, 0.1])
    data = envelope(result)['data']
    assert data['points'] == 3
    assert data['label'] == 'PathLasso(omega=zero)'


def test_path_tslasso_walks_omega(cli, runner, simulated, tmp_path):
    out = tmp_path / 'ts'
    result = runner.invoke(cli, ['path', '-i', str(simulated / 'rep001_dataset.csv'), '--method', 'tslasso',
                                 *SMALL_GRID, '-o', str(out)])
    assert result.exit_code == 0, result.stderr
    table = pd.read_csv(out / 'path.csv')
    assert (table['lambda'] == 0.0).all()
    assert table['omega'].tolist() == pytest.approx([10.0, 1.0, 0.1])


def test_cv_too_many_folds(cli, runner, simulated, tmp_path):
    result = runner.invoke(cli, ['cv', '-i', str(simulated / 'rep001_dataset.csv'), '--folds', '50',
                                 *SMALL_GRID, '-o', str(tmp_path / 'cv')])
    assert result.exit_code == 3


def test_cv_then_refit(cli, runner, simulated, tmp_path):
    cv_dir = tmp_path / 'cv'
    result = runner.invoke(cli, ['cv', '-i', str(simulated / 'rep001_dataset.csv'), '--folds', '4',
                                 *SMALL_GRID, '-o', str(cv_dir)])
    assert result.exit_code == 0, result.stderr
    table = pd.read_csv(cv_dir / 'cv.csv')
    assert table['chosen'].sum() == 1
    assert {'fold1', 'fold4', 'mean_loss'} <= set(table.columns)
    assert envelope(result)['data']['chosen'] == int(table['mean_loss'].idxmin())

    refit_dir = tmp_path / 'refit'
    result = runner.invoke(cli, ['refit', '-i', str(simulated / 'rep001_dataset.csv'),
                                 '--selected', str(cv_dir / 'selected.csv'), '--resamples', '20',
                                 '-o', str(refit_dir)])
    assert result.exit_code == 0, result.stderr
    refit = pd.read_csv(refit_dir / 'refit.csv')
    assert list(refit.columns) == REFIT_COLUMNS
    selected = pd.read_csv(cv_dir / 'selected.csv')
    assert len(refit) == len(selected)


def test_cv_warns_when_fits_do_not_converge(cli, runner, simulated, tmp_path):
    out = tmp_path / 'cv'
    result = runner.invoke(cli, ['cv', '-i', str(simulated / 'rep001_dataset.csv'), '--folds', '2',
                                 *STALLED_GRID, '-o', str(out)])
    assert result.exit_code == 0, result.stderr
    payload = envelope(result)
    assert payload['status'] == 'success_with_warning'
    assert payload['warning']['code'] == 'NOT_CONVERGED'
    # 3 full-data fits and 3 x 2 fold fits
    assert payload['warning']['message'].startswith('9 of 9 fits')
    stages = {row.get('stage') for row in payload['warning']['details']}
    assert {'fold1', 'fold2'} <= stages
    table = pd.read_csv(out / 'cv.csv')
    assert not table['converged'].any()
    assert (table['folds_converged'] == 0).all()


def test_refit_requires_selection(cli, runner, simulated, tmp_path):
    result = runner.invoke(cli, ['refit', '-i', str(simulated / 'rep001_dataset.csv'), '-o', str(tmp_path)])
    assert result.exit_code == 3


def test_compare_without_datasets(cli, runner, tmp_path):
    result = runner.invoke(cli, ['compare', '-o', str(tmp_path)])
    assert result.exit_code == 3


def test_compare_accuracy_mode(cli, runner, simulated, tmp_path):
    out = tmp_path / 'compare'
    result = runner.invoke(cli, ['compare', '-i', str(simulated), '--folds', '0', *SMALL_GRID, '-o', str(out)])
    assert result.exit_code == 0, result.stderr
    data = envelope(result)['data']
    assert data['mode'] == 'accuracy'
    assert data['replicates'] == 2
    for name in ('roc_points.csv', 'auc.csv', 'metrics.csv', 'matched_f1.csv', 'matched_mse.csv', 'summary.csv'):
        assert (out / name).exists()
    summary = pd.read_csv(out / 'summary.csv')
    bk_auc = summary[(summary['method'] == 'BK') & (summary['metric'] == 'auc')]
    assert bk_auc['n'].tolist() == [2]
    auc = pd.read_csv(out / 'auc.csv')
    assert set(auc['replicate']) == {1, 2}
    bk = pd.read_csv(out / 'bk.csv')
    assert list(bk.columns[:10]) == ['replicate', 'mediator', 'a', 'se_a', 'b', 'se_b', 'ab', 'z', 'p', 'selected']
    assert len(bk) == 10
    assert bk['mediator'].tolist() == [1, 2, 3, 4, 5] * 2
    assert 'converged' in pd.read_csv(out / 'metrics.csv').columns


def test_compare_warns_when_fits_do_not_converge(cli, runner, simulated, tmp_path):
    out = tmp_path / 'compare'
    result = runner.invoke(cli, ['compare', '-i', str(simulated), '--folds', '0', *STALLED_GRID, '-o', str(out)])
    assert result.exit_code == 0, result.stderr
    payload = envelope(result)
    assert payload['status'] == 'success_with_warning'
    assert payload['warning']['code'] == 'NOT_CONVERGED'
    # TSLasso and three PathLasso paths of 3 points, per replicate
    assert payload['warning']['message'].startswith('24 of 24 fits')
    assert {row['replicate'] for row in payload['warning']['details']} == {1, 2}
    assert not pd.read_csv(out / 'metrics.csv')['converged'].any()
    roc = pd.read_csv(out / 'roc_points.csv')
    assert roc.loc[roc['method'] == 'BK', 'path_converged'].all()
    assert not roc.loc[roc['method'] != 'BK', 'path_converged'].any()


def test_compare_stability_mode(cli, runner, simulated, tmp_path):
    first, second = tmp_path / 'first.csv', tmp_path / 'second.csv'
    first.write_bytes((simulated / 'rep001_dataset.csv').read_bytes())
    second.write_bytes((simulated / 'rep002_dataset.csv').read_bytes())
    out = tmp_path / 'stability'
    result = runner.invoke(cli, ['compare', '-i', str(first), '-i', str(second), '--folds', '0',
                                 *SMALL_GRID, '-o', str(out)])
    assert result.exit_code == 0, result.stderr
    assert envelope(result)['data']['mode'] == 'stability'
    table = pd.read_csv(out / 'stability.csv')
    assert table['jaccard'].between(0, 1).all()
    assert (out / 'stability_summary.csv').exists()


def test_compare_partial_truth(cli, runner, simulated, tmp_path):
    lone = tmp_path / 'lone.csv'
    lone.write_bytes((simulated / 'rep001_dataset.csv').read_bytes())
    result = runner.invoke(cli, ['compare', '-i', str(simulated / 'rep001_dataset.csv'), '-i', str(lone),
                                 '--folds', '0', *SMALL_GRID, '-o', str(tmp_path / 'out')])
    assert result.exit_code == 3
    assert 'missing truth' in error_of(result)['message']


def test_config_file_overrides_defaults(cli, runner, tmp_path):
    config = tmp_path / 'params.json'
    config.write_text(json.dumps({'n': 12, 'k': 3}))
    out = tmp_path / 'sim'
    result = runner.invoke(cli, ['simulate', '--config', str(config), '--k', '4', '-o', str(out)])
    assert result.exit_code == 0, result.stderr
    frame = pd.read_csv(out / 'rep001_dataset.csv')
    assert frame.shape == (12, 6)
    stored = json.loads((out / 'config.json').read_text())
    assert stored['params']['n'] == 12
    assert stored['params']['k'] == 4


def test_outputs_do_not_depend_on_thread_count(cli, runner, tmp_path):
    sims = []
    for threads in ('1', '2'):
        out = tmp_path / f'sim{threads}'
        result = runner.invoke(cli, ['simulate', '--n', '20', '--k', '5', '--reps', '2', '--seed', '3',
                                     '--threads', threads, '-o', str(out)])
        assert result.exit_code == 0, result.stderr
        sims.append(out)
    for name in ('rep001_dataset.csv', 'rep002_truth.json', 'config.json'):
        assert (sims[0] / name).read_bytes() == (sims[1] / name).read_bytes()

    runs = []
    for threads in ('1', '2'):
        out = tmp_path / f'cv{threads}'
        result = runner.invoke(cli, ['cv', '-i', str(sims[0] / 'rep001_dataset.csv'), '--folds', '4',
                                     '--threads', threads, *SMALL_GRID, '-o', str(out)])
        assert result.exit_code == 0, result.stderr
        runs.append(out)
    for name in ('cv.csv', 'selected.csv', 'config.json'):
        assert (runs[0] / name).read_bytes() == (runs[1] / name).read_bytes()
    stored = json.loads((runs[0] / 'config.json').read_text())
    assert 'threads' not in stored['params']
    assert 'output_dir' not in stored['params']


def test_config_file_unknown_key(cli, runner, tmp_path):
    config = tmp_path / 'params.json'
    config.write_text(json.dumps({'lambda_typo': 1}))
    result = runner.invoke(cli, ['simulate', '--config', str(config), '-o', str(tmp_path / 'sim')])
    assert result.exit_code == 3
    assert 'lambda_typo' in error_of(result)['message']


def test_config_file_missing(cli, runner, tmp_path):
    result = runner.invoke(cli, ['simulate', '--config', str(tmp_path / 'absent.json'), '-o', str(tmp_path)])
    assert result.exit_code == 2


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
