"""
Tests for the Baron-Kenny baseline, the Sobel test, BH selection and the
two-stage lasso.
"""
import pytest
import sys
import os

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from pathlasso.models import MediationDataset, Method, PenaltySpec, SolverOptions, StandardizedDataset
from pathlasso.services.admm import build_omega_grid, fit_path
from pathlasso.services.baselines import bh_adjust, bh_select, bk_fit, sobel_test, tslasso_path
from pathlasso.services.core import standardize


def centered_unit(values):
    values = np.asarray(values, dtype=float)
    values = values - values.mean()
    return values / values.std(ddof=1)


def as_standardized(z, m, r):
    """Wrap data that is already standardized without touching it."""
    dataset = MediationDataset(z, m, r)
    width = dataset.k + 2
    return StandardizedDataset(dataset, np.zeros(width), np.ones(width))


@pytest.fixture
def random_data():
    rng = np.random.default_rng(31)
    z = rng.standard_normal(100)
    m = np.outer(z, [1.0, 0.0, -0.5]) + rng.standard_normal((100, 3))
    r = 0.3 * z + m @ np.array([0.8, 0.0, 0.0]) + rng.standard_normal(100)
    return standardize(MediationDataset(z, m, r))


def test_sobel_worked_example():
    z, p = sobel_test(3.0, 1.0, 4.0, 1.0)
    assert z == pytest.approx(2.4)
    assert p == pytest.approx(0.01640, abs=1e-5)


def test_sobel_conventions():
    assert sobel_test(0.0, 0.5, 2.0, 0.5) == (0.0, 1.0)
    z, p = sobel_test(2.0, 0.0, 3.0, 0.0)
    assert p == 0.0
    assert z == np.inf
    assert sobel_test(0.0, 0.0, 3.0, 0.0) == (0.0, 1.0)
    with pytest.raises(ValueError):
        sobel_test(1.0, -0.1, 1.0, 0.1)


def test_sobel_sign_flip_invariance():
    _, p = sobel_test(1.3, 0.4, -0.7, 0.2)
    _, flipped = sobel_test(-1.3, 0.4, 0.7, 0.2)
    assert p == pytest.approx(flipped)


@pytest.mark.parametrize('pvalues, expected', [
    ((0.01, 0.02, 0.04, 0.05), [True, True, True, True]),
    ((0.5, 0.9), [False, False]),
    ((0.001, 0.9), [True, False]),
])
def test_bh_select_examples(pvalues, expected):
    assert_array_equal(bh_select(pvalues, 0.05), expected)


def test_bh_select_monotone_in_level():
    rng = np.random.default_rng(2)
    for _ in range(200):
        p = rng.uniform(0, 0.2, size=8)
        strict = bh_select(p, 0.05)
        loose = bh_select(p, 0.10)
        assert np.all(loose[strict])


def test_bh_select_validation():
    assert bh_select([], 0.05).shape == (0,)
    with pytest.raises(ValueError):
        bh_select([0.1, 1.2], 0.05)
    with pytest.raises(ValueError):
        bh_select([0.1], 1.5)


def test_bh_adjust():
    q = bh_adjust([0.01, 0.04, 0.03, 0.5])
    assert_allclose(q, [0.04, 0.16 / 3, 0.16 / 3, 0.5])
    assert_array_equal(bh_adjust([0.01, 0.04, 0.03, 0.5]) <= 0.05, bh_select([0.01, 0.04, 0.03, 0.5], 0.05))


def test_bk_fit_matches_normal_equations(random_data):
    results = bk_fit(random_data)
    z, r = random_data.z, random_data.r
    assert [row.mediator for row in results] == [1, 2, 3]
    for j, row in enumerate(results):
        mj = random_data.m[:, j]
        assert row.a_hat == pytest.approx(float(z @ mj / (z @ z)), abs=1e-10)
        x = np.column_stack([z, mj])
        c, b = np.linalg.solve(x.T @ x, x.T @ r)
        assert row.b_hat == pytest.approx(b, abs=1e-10)
        assert row.c_hat == pytest.approx(c, abs=1e-10)
        assert row.ab_hat == pytest.approx(row.a_hat * row.b_hat)
        assert not row.degenerate


def test_bk_fit_standard_errors(random_data):
    """Homoskedastic OLS standard errors, sigma^2 (X'X)^-1 with n - p degrees of freedom."""
    results = bk_fit(random_data)
    z, r, n = random_data.z, random_data.r, random_data.n
    for j, row in enumerate(results):
        mj = random_data.m[:, j]
        resid_a = mj - z * row.a_hat
        assert row.se_a == pytest.approx(np.sqrt(resid_a @ resid_a / (n - 1) / (z @ z)), rel=1e-8)
        x = np.column_stack([z, mj])
        resid_b = r - x @ np.array([row.c_hat, row.b_hat])
        cov = (resid_b @ resid_b) / (n - 2) * np.linalg.inv(x.T @ x)
        assert row.se_b == pytest.approx(np.sqrt(cov[1, 1]), rel=1e-8)


def test_bk_row_columns(random_data):
    row = bk_fit(random_data)[0].to_dict()
    assert list(row)[:9] == ['mediator', 'a', 'se_a', 'b', 'se_b', 'ab', 'z', 'p', 'selected']
    assert row['mediator'] == 1
    assert row['label'] == 'M1'


def test_bk_fit_selects_strong_mediator(random_data):
    results = bk_fit(random_data, q=0.05)
    assert results[0].selected
    assert results[0].p_value < 1e-4


def test_bk_fit_noiseless_recovery():
    """M1 = 2Z + e with e orthogonal to Z and R = 3 M1 recover a = 2, b = 3."""
    z = centered_unit([1.0, -1.0, 2.0, -2.0, 0.5, -0.5])
    e = 0.1 * np.array([1.0, 1.0, -1.0, -1.0, 0.0, 0.0])
    e = e - z * (z @ e) / (z @ z)
    m1 = 2.0 * z + e
    dataset = as_standardized(z, m1[:, None], 3.0 * m1)
    row = bk_fit(dataset)[0]
    assert row.a_hat == pytest.approx(2.0, abs=1e-10)
    assert row.b_hat == pytest.approx(3.0, abs=1e-10)
    assert row.c_hat == pytest.approx(0.0, abs=1e-10)
    assert row.p_value < 1e-6


def test_bk_fit_flags_collinear_mediator():
    """A mediator that is an exact multiple of Z has a rank-deficient outcome design."""
    z = centered_unit([1.0, -1.0, 2.0, -2.0, 0.5])
    dataset = as_standardized(z, (2.0 * z)[:, None], 6.0 * z)
    row = bk_fit(dataset)[0]
    assert row.degenerate
    assert row.p_value == 1.0
    assert not row.selected
    assert row.a_hat == pytest.approx(2.0)


def test_bk_fit_needs_four_rows():
    dataset = as_standardized([1.0, -1.0, 0.0], [[1.0], [0.0], [-1.0]], [0.0, 1.0, -1.0])
    with pytest.raises(ValueError):
        bk_fit(dataset)


def test_tslasso_path_is_lambda_zero_fit_path(random_data):
    grid = build_omega_grid(1e-2, 10.0, 4)
    opts = SolverOptions(max_iter=2000)
    path = tslasso_path(random_data, grid, opts)
    reference = fit_path(random_data, grid, opts)
    assert path.method is Method.tslasso
    assert path.label == 'TSLasso'
    assert_array_equal(path.pathway_effects, reference.pathway_effects)
    assert path.varies_omega


def test_tslasso_path_limits(random_data):
    opts = SolverOptions(max_iter=20000, tol_primal=1e-9, tol_change=1e-10)
    path = tslasso_path(random_data, build_omega_grid(1e-8, 1e3, 2), opts)
    assert_allclose(path.fits[0].coefs.a, 0.0)
    assert_allclose(path.fits[0].coefs.b, 0.0)

    z, m, r = random_data.z, random_data.m, random_data.r
    x = np.column_stack([z, m])
    ols = np.linalg.lstsq(x, r, rcond=None)[0]
    assert_allclose(path.fits[1].coefs.b, ols[1:], atol=1e-5)
    assert_allclose(path.fits[1].coefs.a, z @ m / (z @ z), atol=1e-5)


def test_tslasso_path_rejects_product_penalty(random_data):
    with pytest.raises(ValueError, match='lambda = 0'):
        tslasso_path(random_data, [PenaltySpec(lam=0.1, omega=1.0)])
    with pytest.raises(ValueError, match='positive omega'):
        tslasso_path(random_data, [PenaltySpec(lam=0.0, omega=0.0)])


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
