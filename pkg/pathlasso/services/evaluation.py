"""
Evaluation service - pathway selection, accuracy and stability metrics,
matched comparisons across methods and cross-validation.
"""
import logging

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.integrate import trapezoid

from pathlasso.config import Config
from pathlasso.models import CvReport, Method, OmegaRule, PathResult, RocCurve, SelectionResult
from pathlasso.services.admm import build_grid, build_omega_grid, fit_path
from pathlasso.services.baselines import bk_fit, tslasso_path
from pathlasso.utils.validators import validate_same_length

logger = logging.getLogger(__name__)


def fit_method_path(dataset, specs, method=Method.pathlasso, opts=None, warm_start=True, cutoff=None, label=''):
    """Path of one method: TSLasso goes through tslasso_path, PathLasso through fit_path."""
    if Method(method) is Method.tslasso:
        return tslasso_path(dataset, specs, opts, cutoff=cutoff, warm_start=warm_start)
    return fit_path(dataset, specs, opts, warm_start=warm_start, method=method, cutoff=cutoff, label=label)


def unconverged_fits(fits, **context):
    """Records of the fits that stopped at max_iter, tagged with context."""
    return [{**context, 'lambda': fit.spec.lam, 'omega': fit.spec.omega,
             'primal_residual': fit.primal_residual}
            for fit in fits if not fit.converged]


def select_pathways(ab, cutoff=None, source='PathLasso'):
    """
    Select mediators with |a_j b_j| strictly above the cutoff.

    Returns:
        SelectionResult: 1-based mediator indices
    """
    cutoff = Config.SELECTION_CUTOFF if cutoff is None else float(cutoff)
    if cutoff <= 0:
        raise ValueError('cutoff must be positive')
    ab = np.asarray(ab, dtype=float)
    selected = frozenset(int(j) + 1 for j in np.flatnonzero(np.abs(ab) > cutoff))
    return SelectionResult(selected=selected, cutoff=cutoff, source=source)


def _as_set(selection):
    if isinstance(selection, SelectionResult):
        return set(selection.selected)
    return set(selection)


def f1_score(selected, truth):
    """
    Harmonic mean of precision and recall of a selection.

    Precision is 0 when nothing is selected.

    Raises:
        ValueError: If truth is empty
    """
    selected, truth = _as_set(selected), _as_set(truth)
    if not truth:
        raise ValueError('truth set must be nonempty')
    hits = len(selected & truth)
    precision = hits / len(selected) if selected else 0.0
    recall = hits / len(truth)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def mse_ab(ab_hat, ab_true):
    """Total squared error of the pathway effects, summed over all K."""
    ab_hat = np.asarray(ab_hat, dtype=float)
    ab_true = np.asarray(ab_true, dtype=float)
    validate_same_length(ab_hat, ab_true, 'ab_hat', 'ab_true')
    return float(np.sum((ab_hat - ab_true) ** 2))


def jaccard(first, second):
    """|s1 & s2| / |s1 | s2|, with two empty sets counting as identical."""
    first, second = _as_set(first), _as_set(second)
    union = first | second
    if not union:
        return 1.0
    return len(first & second) / len(union)


def l2_difference(first, second):
    """Euclidean distance between two pathway-effect vectors."""
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    validate_same_length(first, second, 'first', 'second')
    return float(np.linalg.norm(first - second))


def _rates(selected, truth, k):
    negatives = k - len(truth)
    tpr = len(selected & truth) / len(truth)
    fpr = len(selected - truth) / negatives
    return fpr, tpr


def _staircase(fpr, tpr):
    """Anchor (0,0)/(1,1), sort by fpr and take the running max of tpr."""
    fpr = np.concatenate([[0.0], np.asarray(fpr, dtype=float), [1.0]])
    tpr = np.concatenate([[0.0], np.asarray(tpr, dtype=float), [1.0]])
    order = np.lexsort((tpr, fpr))
    fpr, tpr = fpr[order], np.maximum.accumulate(tpr[order])
    points = pd.DataFrame({'fpr': fpr, 'tpr': tpr}).drop_duplicates()
    return points['fpr'].to_numpy(), points['tpr'].to_numpy()


def roc_curve(path_or_pvalues, truth, k=None):
    """
    ROC curve and AUC of a selection procedure.

    Args:
        path_or_pvalues: PathResult (one point per grid value at the path's
            cutoff) or per-mediator p-values (points from sweeping the
            threshold over every distinct p-value)
        truth: Set of true mediators (1-based)
        k: Number of mediators; inferred when omitted

    Returns:
        RocCurve: Upper-staircase points and trapezoid AUC

    Raises:
        ValueError: If truth is empty or contains every mediator
    """
    truth = _as_set(truth)
    if isinstance(path_or_pvalues, PathResult):
        path = path_or_pvalues
        k = k or path.pathway_effects.shape[1]
        selections = path.selected_sets
    else:
        pvalues = np.asarray(path_or_pvalues, dtype=float)
        k = k or pvalues.shape[0]
        selections = [set(int(j) + 1 for j in np.flatnonzero(pvalues <= t))
                      for t in np.unique(pvalues)]
    if not truth:
        raise ValueError('truth set must be nonempty')
    if len(truth) >= k:
        raise ValueError('false-positive rate undefined when every mediator is true')

    rates = [_rates(set(s), truth, k) for s in selections]
    fpr, tpr = _staircase([r[0] for r in rates], [r[1] for r in rates])
    return RocCurve(fpr=fpr, tpr=tpr, auc=float(trapezoid(tpr, fpr)))


def path_metrics(path, truth):
    """
    Per-grid-point metric table for one path.

    Args:
        path: PathResult
        truth: TruthRecord

    Returns:
        pandas.DataFrame: method, grid_value, converged, support_size, l1_norm, f1, mse, fpr, tpr
    """
    true_set = truth.true_set
    k = path.pathway_effects.shape[1]
    rows = []
    for value, fit, ab, selected, l1 in zip(path.grid_values, path.fits, path.pathway_effects,
                                            path.selected_sets, path.l1_norms):
        fpr, tpr = _rates(set(selected), true_set, k)
        rows.append({
            'method': path.label,
            'grid_value': float(value),
            'converged': fit.converged,
            'support_size': len(selected),
            'l1_norm': float(l1),
            'f1': f1_score(selected, true_set),
            'mse': mse_ab(ab, truth.ab_true),
            'fpr': fpr,
            'tpr': tpr,
        })
    return pd.DataFrame(rows)


def _nearest(frame, column, target):
    distance = (frame[column] - target).abs()
    ranked = frame.assign(_distance=distance).sort_values(['_distance', 'grid_value'], kind='mergesort')
    return ranked.iloc[0]


def matched_curves(paths, truth, n_l1=50):
    """
    Compare methods at equal support size and at equal l1 norm of the
    pathway effects.

    Args:
        paths: Mapping of method label to PathResult
        truth: TruthRecord
        n_l1: Number of l1-norm targets on the common grid

    Returns:
        tuple: (f1 table keyed by support size, mse table keyed by l1 target)
    """
    tables = {}
    for label, path in paths.items():
        if len(path) == 0:
            raise ValueError(f'path for {label} is empty')
        tables[label] = path_metrics(path, truth)

    supports = sorted(set().union(*(set(t['support_size']) for t in tables.values())))
    f1_rows = []
    for size in supports:
        for label, table in tables.items():
            row = _nearest(table, 'support_size', size)
            f1_rows.append({'support_size': size, 'method': label, 'grid_value': row['grid_value'],
                            'matched_support': int(row['support_size']), 'f1': row['f1']})

    all_l1 = np.concatenate([t['l1_norm'].to_numpy() for t in tables.values()])
    targets = np.linspace(all_l1.min(), all_l1.max(), n_l1)
    mse_rows = []
    for target in targets:
        for label, table in tables.items():
            row = _nearest(table, 'l1_norm', target)
            mse_rows.append({'l1_target': float(target), 'method': label, 'grid_value': row['grid_value'],
                             'matched_l1': row['l1_norm'], 'mse': row['mse']})
    return pd.DataFrame(f1_rows), pd.DataFrame(mse_rows)


def stability(first, second):
    """
    Agreement of two runs along the same grid.

    Returns:
        pandas.DataFrame: grid_value, converged (both runs), jaccard,
        l2_difference and l1 norms per point
    """
    if len(first) != len(second):
        raise ValueError('paths must share the grid')
    rows = []
    for value, fit1, fit2, s1, s2, ab1, ab2 in zip(first.grid_values, first.fits, second.fits,
                                                   first.selected_sets, second.selected_sets,
                                                   first.pathway_effects, second.pathway_effects):
        rows.append({
            'method': first.label,
            'grid_value': float(value),
            'converged': fit1.converged and fit2.converged,
            'jaccard': jaccard(s1, s2),
            'l2_difference': l2_difference(ab1, ab2),
            'l1_norm_first': float(np.abs(ab1).sum()),
            'l1_norm_second': float(np.abs(ab2).sum()),
        })
    return pd.DataFrame(rows)


def summarize(records):
    """
    Mean and standard deviation per method and metric.

    Args:
        records: DataFrame with columns method, metric, value (one row per
            replicate and metric)

    Returns:
        pandas.DataFrame: method, metric, mean, sd, n
    """
    grouped = records.groupby(['method', 'metric'], sort=True)['value']
    summary = grouped.agg(mean='mean', sd='std', n='count').reset_index()
    summary['sd'] = summary['sd'].fillna(0.0)
    return summary


def _heldout_loss(dataset, rows, coefs):
    z, m, r = dataset.z[rows], dataset.m[rows], dataset.r[rows]
    mediator_residual = m - np.outer(z, coefs.a)
    outcome_residual = r - z * coefs.c - m @ coefs.b
    return float(np.sum(mediator_residual ** 2) + outcome_residual @ outcome_residual)


def _fold_losses(dataset, specs, test_rows, opts, warm_start, method):
    train_rows = np.setdiff1d(np.arange(dataset.n), test_rows)
    path = fit_method_path(dataset.subset(train_rows), specs, method, opts, warm_start=warm_start)
    losses = np.array([_heldout_loss(dataset, test_rows, f.coefs) for f in path.fits])
    return losses, np.array([f.converged for f in path.fits])


def fold_partition(n, folds, seed):
    """Seeded split of range(n) into near-equal folds (sizes differ by <= 1)."""
    rng = np.random.default_rng(seed)
    return [np.sort(part) for part in np.array_split(rng.permutation(n), folds)]


def cross_validate(dataset, specs, folds=None, seed=0, opts=None, warm_start=True,
                   threads=1, method=None):
    """
    K-fold cross-validation of a tuning grid on the held-out loss with
    identity weights.

    Folds are subsets of the standardized data and are not re-standardized.
    Warm starts run along each fold's path, never across folds.

    Args:
        dataset: StandardizedDataset
        specs: PenaltySpecs (sorted by decreasing lambda when warm_start)
        folds: Number of folds (default Config.CV_FOLDS)
        seed: Partition seed
        opts: SolverOptions
        warm_start: Warm-start along each fold's path
        threads: joblib workers over folds

    Returns:
        CvReport: includes the convergence flag of every fold fit

    Raises:
        ValueError: If folds < 2 or folds > n
    """
    folds = Config.CV_FOLDS if folds is None else int(folds)
    method = method or Method.pathlasso
    specs = list(specs)
    if folds < 2:
        raise ValueError('cross-validation needs at least 2 folds')
    if folds > dataset.n:
        raise ValueError(f'{folds} folds requested for {dataset.n} observations')

    partition = fold_partition(dataset.n, folds, seed)
    logger.info('cross-validating %d specs over %d folds', len(specs), folds)
    per_fold = Parallel(n_jobs=threads)(
        delayed(_fold_losses)(dataset, specs, rows, opts, warm_start, method) for rows in partition
    )
    fold_losses = np.column_stack([losses for losses, _ in per_fold])
    fold_converged = np.column_stack([converged for _, converged in per_fold])
    if not fold_converged.all():
        logger.warning('%d of %d fold fits did not converge', int((~fold_converged).sum()), fold_converged.size)
    mean_loss = fold_losses.mean(axis=1)
    return CvReport(
        grid=tuple(specs),
        mean_loss=mean_loss,
        fold_losses=fold_losses,
        chosen=int(np.argmin(mean_loss)),
        folds=folds,
        seed=seed,
        fold_sizes=tuple(len(rows) for rows in partition),
        fold_converged=fold_converged,
    )


COMPARED_RULES = (OmegaRule.zero, OmegaRule.tenth, OmegaRule.equal)


def method_grids(lambda_min=None, lambda_max=None, n_lambda=None, phi=None, w2=1.0,
                 rules=COMPARED_RULES):
    """
    Tuning grids of the compared path methods.

    Returns:
        list: (label, Method, specs) for TSLasso and one PathLasso entry per
        omega rule
    """
    plan = [(Method.tslasso.value, Method.tslasso,
             build_omega_grid(lambda_min, lambda_max, n_lambda, phi=phi, w2=w2))]
    for rule in rules:
        rule = OmegaRule(rule)
        plan.append((f'{Method.pathlasso.value}(omega={rule.value})', Method.pathlasso,
                     build_grid(lambda_min, lambda_max, n_lambda, omega_rule=rule, phi=phi, w2=w2)))
    return plan


def _fit_plan(dataset, plan, opts, cutoff, folds, seed, threads):
    """
    Path and (optionally) CV report per method, plus the convergence record
    {'unconverged': [...], 'fits': total} over every path and fold fit.
    """
    fitted = {}
    convergence = {'unconverged': [], 'fits': 0}
    for label, method, specs in plan:
        path = fit_method_path(dataset, specs, method, opts, cutoff=cutoff, label=label)
        convergence['unconverged'] += unconverged_fits(path.fits, method=label, stage='path')
        convergence['fits'] += len(path)
        report = None
        if folds:
            report = cross_validate(dataset, specs, folds=folds, seed=seed, opts=opts,
                                    threads=threads, method=method)
            convergence['unconverged'] += [
                {'method': label, 'stage': f"fold{row['fold']}", 'lambda': row['lambda'], 'omega': row['omega']}
                for row in report.unconverged
            ]
            convergence['fits'] += report.fold_converged.size
        fitted[label] = (path, report)
    return fitted, convergence


def bk_frame(bk):
    """BK rows as the BK CSV table."""
    return pd.DataFrame([row.to_dict() for row in bk])


def compare_methods(dataset, truth, plan, opts=None, cutoff=None, q=None, folds=None, seed=0, threads=1):
    """
    Run BK and every path method of the plan on one replicate and score
    them against the truth.

    Args:
        dataset: StandardizedDataset
        truth: TruthRecord
        plan: Output of method_grids
        folds: CV folds for the tuned F1/MSE records; 0 or None skips tuning

    Returns:
        dict: 'roc' (method, path_converged, fpr, tpr), 'metrics'
        (path_metrics rows), 'matched_f1', 'matched_mse', 'records'
        (method, metric, value), 'bk' (BK CSV rows) and 'convergence'
        (unconverged fit records and the number of fits)
    """
    true_set = truth.true_set
    records = []
    roc_tables = []

    bk = bk_fit(dataset, q)
    bk_label = Method.bk.value
    bk_roc = roc_curve(np.array([row.p_value for row in bk]), true_set, dataset.k)
    bk_selected = {row.mediator for row in bk if row.selected}
    roc_tables.append(pd.DataFrame({'method': bk_label, 'path_converged': True,
                                    'fpr': bk_roc.fpr, 'tpr': bk_roc.tpr}))
    records += [
        {'method': bk_label, 'metric': 'auc', 'value': bk_roc.auc},
        {'method': bk_label, 'metric': 'f1', 'value': f1_score(bk_selected, true_set)},
        {'method': bk_label, 'metric': 'mse', 'value': mse_ab([row.ab_hat for row in bk], truth.ab_true)},
    ]

    fitted, convergence = _fit_plan(dataset, plan, opts, cutoff, folds, seed, threads)
    for label, (path, report) in fitted.items():
        roc = roc_curve(path, true_set)
        roc_tables.append(pd.DataFrame({'method': label, 'path_converged': path.all_converged,
                                        'fpr': roc.fpr, 'tpr': roc.tpr}))
        records.append({'method': label, 'metric': 'auc', 'value': roc.auc})
        if report is not None:
            fit = path.fits[report.chosen]
            selected = path.selected_sets[report.chosen]
            records += [
                {'method': label, 'metric': 'f1', 'value': f1_score(selected, true_set)},
                {'method': label, 'metric': 'mse', 'value': mse_ab(fit.coefs.ab, truth.ab_true)},
            ]

    paths = {label: path for label, (path, _) in fitted.items()}
    matched_f1, matched_mse = matched_curves(paths, truth)
    return {
        'roc': pd.concat(roc_tables, ignore_index=True),
        'metrics': pd.concat([path_metrics(p, truth) for p in paths.values()], ignore_index=True),
        'matched_f1': matched_f1,
        'matched_mse': matched_mse,
        'records': pd.DataFrame(records),
        'bk': bk_frame(bk),
        'convergence': convergence,
    }


def compare_stability(first, second, plan, opts=None, cutoff=None, q=None, folds=None, seed=0, threads=1):
    """
    Two-run agreement of every method: per grid point, and at each run's
    CV-chosen point when folds is set.

    Returns:
        tuple: (per-grid stability table, summary table with one row per
        method, convergence record over the fits of both runs)
    """
    tables = []
    summary = []

    bk_first, bk_second = bk_fit(first, q), bk_fit(second, q)
    summary.append({
        'method': Method.bk.value,
        'jaccard': jaccard({r.mediator for r in bk_first if r.selected},
                           {r.mediator for r in bk_second if r.selected}),
        'l2_difference': l2_difference([r.ab_hat for r in bk_first], [r.ab_hat for r in bk_second]),
    })

    fitted_first, convergence_first = _fit_plan(first, plan, opts, cutoff, folds, seed, threads)
    fitted_second, convergence_second = _fit_plan(second, plan, opts, cutoff, folds, seed, threads)
    for label, _, _ in plan:
        path1, report1 = fitted_first[label]
        path2, report2 = fitted_second[label]
        tables.append(stability(path1, path2))
        if report1 is not None:
            summary.append({
                'method': label,
                'jaccard': jaccard(path1.selected_sets[report1.chosen], path2.selected_sets[report2.chosen]),
                'l2_difference': l2_difference(path1.pathway_effects[report1.chosen],
                                               path2.pathway_effects[report2.chosen]),
            })
    convergence = {
        'unconverged': ([{'run': 1, **row} for row in convergence_first['unconverged']]
                        + [{'run': 2, **row} for row in convergence_second['unconverged']]),
        'fits': convergence_first['fits'] + convergence_second['fits'],
    }
    return pd.concat(tables, ignore_index=True), pd.DataFrame(summary), convergence
