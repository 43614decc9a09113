"""
Tests for standardization, the loss, the penalties and the objective.
"""
import pytest
import sys
import os

import numpy as np
from numpy.testing import assert_allclose

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from pathlasso.models import MediationDataset, PathwayCoefficients, PenaltySpec, StandardizedDataset
from pathlasso.services.core import (
    augmented_design, back_transform, loss, objective, pathway_effects, penalty_p1, penalty_p2,
    standardize, total_effect,
)


@pytest.fixture
def small_dataset():
    """Three rows where A = B = 1, C = 0 leaves one unit residual in each block."""
    return MediationDataset(z=[1.0, 2.0, 3.0], m=[[2.0], [2.0], [3.0]], r=[3.0, 2.0, 3.0])


@pytest.fixture
def random_dataset():
    rng = np.random.default_rng(11)
    z = rng.standard_normal(40)
    m = np.outer(z, [1.0, -0.5, 0.0]) + rng.standard_normal((40, 3))
    r = 0.5 * z + m @ np.array([1.0, 0.0, 2.0]) + rng.standard_normal(40)
    return MediationDataset(z, m, r)


def test_standardize_centers_and_scales(random_dataset):
    """Every column has mean 0 and sample sd 1 after standardization."""
    data = standardize(random_dataset)
    columns = np.column_stack([data.z, data.m, data.r])
    assert isinstance(data, StandardizedDataset)
    assert_allclose(columns.mean(axis=0), 0.0, atol=1e-12)
    assert_allclose(columns.std(axis=0, ddof=1), 1.0, atol=1e-12)
    assert data.centers.shape == (5,)
    assert data.column_names == ('M1', 'M2', 'M3')


def test_standardize_affine_columns_by_hand():
    """Affine copies of Z standardize to the same column."""
    dataset = MediationDataset(z=[1.0, -1.0, 1.0], m=[[2.0], [0.0], [2.0]], r=[3.0, 1.0, 3.0])
    data = standardize(dataset)
    assert_allclose(data.z, data.m[:, 0], atol=1e-12)
    assert_allclose(data.z, data.r, atol=1e-12)
    assert data.z[0] == pytest.approx(1 / np.sqrt(3))


def test_standardize_idempotent(random_dataset):
    once = standardize(random_dataset)
    twice = standardize(once)
    assert_allclose(twice.m, once.m, atol=1e-12)
    assert_allclose(twice.r, once.r, atol=1e-12)
    assert_allclose(twice.centers, once.centers, atol=1e-12)
    assert_allclose(twice.scales, once.scales, rtol=1e-12)


def test_restandardized_data_back_transforms_to_raw_scale(random_dataset):
    """Standardizing twice keeps the raw centers and scales for back_transform."""
    once = standardize(random_dataset)
    twice = standardize(once)
    raw = np.column_stack([random_dataset.z, random_dataset.m, random_dataset.r])
    assert_allclose(twice.centers, raw.mean(axis=0), atol=1e-12)
    assert_allclose(twice.scales, raw.std(axis=0, ddof=1), rtol=1e-12)

    coefs = PathwayCoefficients(a=[0.4, -0.2, 0.1], b=[1.0, 0.0, 0.5], c=0.3)
    expected = back_transform(coefs, once)
    again = back_transform(coefs, twice)
    assert_allclose(again.a, expected.a, rtol=1e-10)
    assert_allclose(again.b, expected.b, rtol=1e-10)
    assert again.c == pytest.approx(expected.c, rel=1e-10)


def test_standardize_constant_column():
    """A constant mediator is rejected with its name."""
    dataset = MediationDataset(z=[1.0, 2.0, 3.0], m=[[5.0], [5.0], [5.0]], r=[1.0, 0.0, 2.0])
    with pytest.raises(ValueError, match="constant column 'M1'"):
        standardize(dataset)


def test_dataset_rejects_mismatched_rows():
    with pytest.raises(ValueError, match='dimension mismatch'):
        MediationDataset(z=[1.0, 2.0, 3.0], m=[[1.0], [2.0]], r=[1.0, 2.0, 3.0])


def test_loss_by_hand(small_dataset):
    coefs = PathwayCoefficients(a=[1.0], b=[1.0], c=0.0)
    assert loss(small_dataset, coefs, PenaltySpec(lam=0.0)) == pytest.approx(2.0)
    assert loss(small_dataset, coefs, PenaltySpec(lam=0.0, w1=(2.0,))) == pytest.approx(3.0)


def test_loss_zero_on_exact_fit():
    z = np.array([1.0, -2.0, 0.5, 3.0])
    m = np.outer(z, [2.0, -1.0])
    r = 0.3 * z + m @ np.array([0.5, 1.5])
    coefs = PathwayCoefficients(a=[2.0, -1.0], b=[0.5, 1.5], c=0.3)
    assert loss(MediationDataset(z, m, r), coefs, PenaltySpec(lam=0.0)) == pytest.approx(0.0, abs=1e-20)


def test_loss_dimension_mismatch(small_dataset):
    with pytest.raises(ValueError, match='dimension mismatch'):
        loss(small_dataset, PathwayCoefficients.zeros(2), PenaltySpec(lam=0.0))


def test_penalty_p1():
    assert penalty_p1(PathwayCoefficients.zeros(1), 2.0) == 0.0
    assert penalty_p1(PathwayCoefficients(a=[1.0], b=[1.0], c=0.0), 0.5) == pytest.approx(2.0)
    assert penalty_p1(PathwayCoefficients(a=[0.0], b=[0.0], c=-2.0), 2.0) == pytest.approx(2.0)


def test_penalty_p2():
    assert penalty_p2(PathwayCoefficients(a=[1.0, -2.0], b=[0.0, 3.0])) == pytest.approx(6.0)
    assert penalty_p2(PathwayCoefficients.zeros(3)) == 0.0
    assert penalty_p2(PathwayCoefficients(a=[0.0], b=[0.0], c=5.0)) == 0.0


def test_objective_composition(small_dataset):
    coefs = PathwayCoefficients(a=[1.0], b=[1.0], c=0.0)
    assert objective(small_dataset, coefs, PenaltySpec(lam=1.0, omega=1.0, phi=0.5)) == pytest.approx(5.0)
    assert objective(small_dataset, coefs, PenaltySpec(lam=0.0)) == pytest.approx(1.0)


def test_objective_midpoint_convex(random_dataset):
    """With phi >= 1/2 the objective never lies above a chord midpoint."""
    data = standardize(random_dataset)
    rng = np.random.default_rng(17)
    for phi in (0.5, 2.0):
        spec = PenaltySpec(lam=rng.uniform(0.1, 2.0), phi=phi, omega=rng.uniform(0.0, 1.0))
        for _ in range(500):
            first, second = rng.uniform(-2.0, 2.0, size=(2, 7))
            f1 = objective(data, PathwayCoefficients(first[:3], first[3:6], first[6]), spec)
            f2 = objective(data, PathwayCoefficients(second[:3], second[3:6], second[6]), spec)
            mid = (first + second) / 2
            f_mid = objective(data, PathwayCoefficients(mid[:3], mid[3:6], mid[6]), spec)
            chord = (f1 + f2) / 2
            assert f_mid <= chord + 1e-10 * max(1.0, abs(chord))


def test_pathway_effects():
    ab, total = pathway_effects(PathwayCoefficients(a=[1.0, 2.0], b=[3.0, -1.0]))
    assert_allclose(ab, [3.0, -2.0])
    assert total == pytest.approx(1.0)

    ab, total = pathway_effects(PathwayCoefficients(a=[-0.5], b=[0.4]))
    assert_allclose(ab, [-0.2])
    assert total == pytest.approx(-0.2)


def test_total_effect():
    z = np.array([1.0, -1.0, 1.0, -1.0])
    dataset = MediationDataset(z, [[1.0], [2.0], [3.0], [4.0]], [1.1, -0.9, 0.9, -1.1])
    assert total_effect(dataset) == pytest.approx(1.0)

    exact = MediationDataset(z, [[1.0], [2.0], [3.0], [4.0]], 2 * z)
    assert total_effect(exact) == pytest.approx(2.0)

    orthogonal = MediationDataset(z, [[1.0], [2.0], [3.0], [4.0]], [1.0, 1.0, -1.0, -1.0])
    assert total_effect(orthogonal) == pytest.approx(0.0)


def test_back_transform_recovers_raw_slopes():
    """Standardized OLS slopes map back to the raw-scale slopes."""
    rng = np.random.default_rng(3)
    z = 5.0 + 2.0 * rng.standard_normal(60)
    m = 1.0 + 3.0 * z[:, None] + 0.5 * rng.standard_normal((60, 1))
    r = -2.0 + 0.7 * z + 1.5 * m[:, 0] + 0.2 * rng.standard_normal(60)
    data = standardize(MediationDataset(z, m, r))

    a_std = float(data.z @ data.m[:, 0] / (data.z @ data.z))
    design = np.column_stack([data.z, data.m])
    c_std, b_std = np.linalg.lstsq(design, data.r, rcond=None)[0]
    raw = back_transform(PathwayCoefficients(a=[a_std], b=[b_std], c=c_std), data)

    zc = z - z.mean()
    assert raw.a[0] == pytest.approx(float(zc @ (m[:, 0] - m[:, 0].mean()) / (zc @ zc)))
    raw_design = np.column_stack([np.ones(60), z, m[:, 0]])
    _, c_raw, b_raw = np.linalg.lstsq(raw_design, r, rcond=None)[0]
    assert raw.b[0] == pytest.approx(b_raw)
    assert raw.c == pytest.approx(c_raw)


def test_augmented_design_masks(random_dataset):
    design = augmented_design(random_dataset, PenaltySpec(lam=1.0, phi=2.0, w1=(1.0, 2.0, 3.0)))
    assert design.x.shape == (40, 4)
    assert_allclose(design.e1, [1.0, 0.0, 0.0, 0.0])
    assert_allclose(design.j_mask, [0.0, 1.0, 1.0, 1.0])
    assert_allclose(design.phi_mask, [0.0, 2.0, 2.0, 2.0])
    assert_allclose(design.omega1, [0.0, 1.0, 2.0, 3.0])


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
