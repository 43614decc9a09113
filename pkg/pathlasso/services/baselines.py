"""
Baselines service - single-mediator Baron-Kenny fits with Sobel tests and
Benjamini-Hochberg selection, and the two-stage lasso.
"""
import logging

import numpy as np
import statsmodels.api as sm
from scipy import stats

from pathlasso.config import Config
from pathlasso.models import BkPathwayResult, Method
from pathlasso.services.admm import fit_path
from pathlasso.utils.validators import validate_probability

logger = logging.getLogger(__name__)


def _ols(design, response):
    """Coefficients, homoskedastic standard errors and rank of a no-intercept OLS fit."""
    n, p = design.shape
    rank = int(np.linalg.matrix_rank(design))
    if rank < p or n <= p:
        coef = np.linalg.lstsq(design, response, rcond=None)[0]
        return coef, np.full(p, np.nan), rank
    result = sm.OLS(response, design).fit()
    return np.asarray(result.params), np.asarray(result.bse), rank


def sobel_test(a, se_a, b, se_b):
    """
    Delta-method test of a*b = 0.

    Returns:
        tuple: (z statistic, two-sided normal p-value). With se_ab = 0 the
        p-value is 0 for ab != 0 and 1 for ab = 0.

    Raises:
        ValueError: If a standard error is negative
    """
    if se_a < 0 or se_b < 0:
        raise ValueError('standard errors must be non-negative')
    ab = a * b
    se_ab = float(np.sqrt(a ** 2 * se_b ** 2 + b ** 2 * se_a ** 2))
    if se_ab == 0:
        if ab == 0:
            return 0.0, 1.0
        return float(np.sign(ab) * np.inf), 0.0
    z = ab / se_ab
    return float(z), float(2.0 * stats.norm.sf(abs(z)))


def bh_adjust(pvalues):
    """
    Benjamini-Hochberg adjusted p-values (q-values).

    Args:
        pvalues: array of p-values

    Returns:
        numpy.ndarray: q-values in the original order, monotone and capped at 1
    """
    p = np.asarray(pvalues, dtype=float)
    if p.size == 0:
        return p.copy()
    if np.any((p < 0) | (p > 1)) or not np.all(np.isfinite(p)):
        raise ValueError('p-values must lie in [0, 1]')
    m = p.size
    order = np.argsort(p, kind='stable')
    scaled = p[order] * m / np.arange(1, m + 1)
    scaled = np.minimum.accumulate(scaled[::-1])[::-1]
    q = np.empty(m)
    q[order] = np.minimum(scaled, 1.0)
    return q


def bh_select(pvalues, q=None):
    """
    Benjamini-Hochberg step-up selection at level q.

    Returns:
        numpy.ndarray: boolean mask of selected hypotheses
    """
    q = validate_probability(Config.FDR_LEVEL if q is None else q, 'q')
    p = np.asarray(pvalues, dtype=float)
    if p.size == 0:
        return np.zeros(0, dtype=bool)
    if np.any((p < 0) | (p > 1)):
        raise ValueError('p-values must lie in [0, 1]')
    m = p.size
    ordered = np.sort(p, kind='stable')
    passing = np.flatnonzero(ordered <= np.arange(1, m + 1) * q / m)
    if passing.size == 0:
        return np.zeros(m, dtype=bool)
    threshold = ordered[passing[-1]]
    return p <= threshold


def bk_fit(dataset, q=None):
    """
    Baron-Kenny analysis of each mediator on its own.

    For mediator j: OLS of M_j on Z gives (a, se_a); OLS of R on (Z, M_j)
    gives (c, b, se_b). Intercepts are omitted because the data are
    standardized. A rank-deficient (Z, M_j) design is flagged degenerate with
    p = 1. Selection uses BH at level q.

    Args:
        dataset: StandardizedDataset
        q: FDR level (default Config.FDR_LEVEL)

    Returns:
        list: BkPathwayResult per mediator, in column order
    """
    if dataset.n < 4:
        raise ValueError('Baron-Kenny fits need at least 4 observations')
    z, r = dataset.z, dataset.r
    rows = []
    for j in range(dataset.k):
        mj = dataset.m[:, j]
        a_coef, a_se, _ = _ols(z[:, None], mj)
        outcome_coef, outcome_se, rank = _ols(np.column_stack([z, mj]), r)
        label = dataset.column_names[j]
        if rank < 2:
            logger.info('mediator %s is collinear with Z; flagged degenerate', label)
            rows.append(dict(mediator=j + 1, label=label, a_hat=float(a_coef[0]), se_a=float(a_se[0]),
                             b_hat=0.0, se_b=float('nan'), c_hat=float(outcome_coef[0]),
                             z_stat=0.0, p_value=1.0, degenerate=True))
            continue
        z_stat, p_value = sobel_test(float(a_coef[0]), float(a_se[0]),
                                     float(outcome_coef[1]), float(outcome_se[1]))
        rows.append(dict(mediator=j + 1, label=label, a_hat=float(a_coef[0]), se_a=float(a_se[0]),
                         b_hat=float(outcome_coef[1]), se_b=float(outcome_se[1]),
                         c_hat=float(outcome_coef[0]), z_stat=z_stat, p_value=p_value,
                         degenerate=False))

    selected = bh_select([row['p_value'] for row in rows], q)
    return [BkPathwayResult(selected=bool(flag), **row) for row, flag in zip(rows, selected)]


def tslasso_path(dataset, omega_grid, opts=None, cutoff=None, warm_start=True):
    """
    Two-stage lasso: the penalized criterion with lambda = 0 along a
    decreasing omega grid.

    Args:
        dataset: StandardizedDataset
        omega_grid: PenaltySpecs with lam = 0 and positive, decreasing omega
        opts: SolverOptions
        cutoff: Selection cutoff for |a_j b_j|
        warm_start: Passed to fit_path

    Returns:
        PathResult tagged TSLasso
    """
    omega_grid = list(omega_grid)
    if any(spec.lam != 0 for spec in omega_grid):
        raise ValueError('two-stage lasso grid must have lambda = 0')
    if any(spec.omega <= 0 for spec in omega_grid):
        raise ValueError('two-stage lasso grid must have positive omega')
    return fit_path(dataset, omega_grid, opts, warm_start=warm_start, method=Method.tslasso,
                    cutoff=cutoff, label=Method.tslasso.value)
