"""
Refit service - unpenalized refit on a selected set of pathways and
case-resampling bootstrap intervals for the refit pathway effects.
"""
import logging
import math

import numpy as np
from joblib import Parallel, delayed

from pathlasso.config import Config
from pathlasso.models import PathwayCoefficients, RefitPathway, RefitReport
from pathlasso.services.core import total_effect
from pathlasso.utils.validators import validate_positive_integer, validate_probability

logger = logging.getLogger(__name__)

MAX_DEGENERATE_SHARE = 0.2


def _selected_columns(selected, k):
    columns = sorted(int(j) for j in selected)
    bad = [j for j in columns if not 1 <= j <= k]
    if bad:
        raise ValueError(f'selected mediators out of range 1..{k}: {bad}')
    return [j - 1 for j in columns]


def _centered(z, m, r):
    return z - z.mean(), m - m.mean(axis=0), r - r.mean()


def _is_degenerate(z, m_selected):
    design = np.column_stack([z, m_selected])
    return np.linalg.matrix_rank(design) < design.shape[1]


def _refit_arrays(z, m, r, columns):
    """OLS refit on centered arrays; returns (a, b, c) over the selected columns."""
    z, m, r = _centered(z, m, r)
    zz = float(z @ z)
    if zz == 0:
        raise ValueError("constant column 'Z': refit undefined")
    m_selected = m[:, columns]
    a = (z @ m_selected) / zz
    design = np.column_stack([z, m_selected])
    coef, _, _, _ = np.linalg.lstsq(design, r, rcond=None)
    return a, coef[1:], float(coef[0])


def refit_selected(dataset, selected):
    """
    Unpenalized refit restricted to the selected pathways.

    a_j is the OLS slope of M_j on Z for j in selected, and (C, b_selected)
    come from the OLS fit of R on (Z, M_selected). Every fit includes an
    intercept, which is zero for standardized data. Unselected coefficients
    are 0.

    Args:
        dataset: MediationDataset or StandardizedDataset
        selected: 1-based mediator indices

    Returns:
        PathwayCoefficients: Full-length coefficients

    Raises:
        ValueError: If more than n - 2 pathways are selected or the design is
            rank deficient
    """
    columns = _selected_columns(selected, dataset.k)
    if len(columns) > dataset.n - 2:
        raise ValueError(f'{len(columns)} pathways selected but n={dataset.n} allows at most {dataset.n - 2}')
    z, m, _ = _centered(dataset.z, dataset.m, dataset.r)
    if columns and _is_degenerate(z, m[:, columns]):
        raise ValueError('refit design (Z, M_selected) is rank deficient')

    a_sel, b_sel, c = _refit_arrays(dataset.z, dataset.m, dataset.r, columns)
    a = np.zeros(dataset.k)
    b = np.zeros(dataset.k)
    a[columns] = a_sel
    b[columns] = b_sel
    return PathwayCoefficients(a=a, b=b, c=c)


def proportion_mediated(ab, total):
    """
    Signed share ab / total of the total effect carried by one pathway.

    Raises:
        ValueError: If the total effect is zero
    """
    if total == 0:
        raise ValueError('proportion mediated undefined for a zero total effect')
    return float(ab) / float(total)


def _resample(dataset, columns, seed, max_redraws):
    """ab over the selected columns for one bootstrap resample, plus the redraw count."""
    rng = np.random.default_rng(seed)
    redraws = 0
    while True:
        rows = rng.integers(0, dataset.n, dataset.n)
        z, m, r = dataset.z[rows], dataset.m[rows], dataset.r[rows]
        zc, mc, _ = _centered(z, m, r)
        if not _is_degenerate(zc, mc[:, columns]):
            a, b, _ = _refit_arrays(z, m, r, columns)
            return a * b, redraws
        redraws += 1
        if redraws > max_redraws:
            return None, redraws


def bootstrap_ci(dataset, selected, resamples=None, level=0.95, seed=0, threads=1):
    """
    Percentile bootstrap intervals for the refit pathway effects.

    Rows are resampled with replacement. A resample whose (Z, M_selected)
    design is rank deficient is redrawn from the same stream and counted.
    Resample i draws from the i-th child of SeedSequence(seed), so results do
    not depend on threads.

    Args:
        dataset: MediationDataset or StandardizedDataset
        selected: 1-based mediator indices
        resamples: Bootstrap resamples (default Config.RESAMPLES)
        level: Interval level in (0, 1)
        seed: Bootstrap seed
        threads: joblib workers

    Returns:
        RefitReport

    Raises:
        ValueError: If more than 20% of resamples had to be redrawn
    """
    resamples = validate_positive_integer(Config.RESAMPLES if resamples is None else resamples, 'resamples')
    level = validate_probability(level, 'level')
    coefs = refit_selected(dataset, selected)
    columns = _selected_columns(selected, dataset.k)
    total = total_effect(dataset)
    labels = dataset.column_names

    if not columns:
        logger.info('empty selection; reporting the total effect only')
        return RefitReport(pathways=(), total_effect=total, resamples=resamples, level=level, seed=seed)

    cap = math.floor(MAX_DEGENERATE_SHARE * resamples)
    children = np.random.SeedSequence(seed).spawn(resamples)
    logger.info('bootstrapping %d pathways with %d resamples', len(columns), resamples)
    draws = Parallel(n_jobs=threads)(
        delayed(_resample)(dataset, columns, child, cap) for child in children
    )
    degenerate = sum(count for _, count in draws)
    if degenerate > cap or any(ab is None for ab, _ in draws):
        raise ValueError(f'{degenerate} degenerate bootstrap resamples exceed {MAX_DEGENERATE_SHARE:.0%} of {resamples}')
    if degenerate:
        logger.warning('%d degenerate bootstrap resamples were redrawn', degenerate)

    effects = np.vstack([ab for ab, _ in draws])
    tail = (1.0 - level) / 2.0
    low, high = np.quantile(effects, [tail, 1.0 - tail], axis=0)

    pathways = []
    for i, j in enumerate(columns):
        ab_refit = float(coefs.a[j] * coefs.b[j])
        pathways.append(RefitPathway(
            mediator=j + 1,
            label=labels[j],
            ab_refit=ab_refit,
            ci_low=float(low[i]),
            ci_high=float(high[i]),
            proportion_mediated=proportion_mediated(ab_refit, total),
        ))
    flagged = [p.label for p in pathways if not p.covers_estimate]
    if flagged:
        logger.warning('percentile interval excludes the point estimate for %s', ', '.join(flagged))

    return RefitReport(
        pathways=tuple(pathways),
        total_effect=total,
        resamples=resamples,
        level=level,
        degenerate_resamples=degenerate,
        seed=seed,
    )
