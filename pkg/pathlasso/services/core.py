"""
Core service - standardization and evaluation of the loss, penalties and
penalized objective.
"""
import logging

import numpy as np

from pathlasso.models import (
    AugmentedDesign, MediationDataset, PathwayCoefficients, StandardizedDataset,
)

logger = logging.getLogger(__name__)


def _check_dimensions(dataset, coefs):
    if coefs.k != dataset.k:
        raise ValueError(f'dimension mismatch: dataset has {dataset.k} mediators, coefficients have {coefs.k}')


def standardize(dataset):
    """
    Center every column and scale it to unit sample sd (denominator n - 1).

    Args:
        dataset: MediationDataset. A StandardizedDataset is re-standardized
            and its raw centers and scales are composed with the new ones,
            so back_transform still returns to the raw scale.

    Returns:
        StandardizedDataset: Standardized data with the centers and scales
        that were removed, in column order (Z, M1..MK, R)

    Raises:
        ValueError: If any column is constant
    """
    if isinstance(dataset, StandardizedDataset):
        inner = standardize(dataset.dataset)
        return StandardizedDataset(
            inner.dataset,
            dataset.centers + dataset.scales * inner.centers,
            dataset.scales * inner.scales,
        )

    columns = np.column_stack([dataset.z, dataset.m, dataset.r])
    names = ('Z',) + dataset.column_names + ('R',)
    for j, name in enumerate(names):
        if np.ptp(columns[:, j]) == 0:
            raise ValueError(f"constant column '{name}' cannot be standardized")

    centers = columns.mean(axis=0)
    scales = columns.std(axis=0, ddof=1)
    scaled = (columns - centers) / scales

    standardized = MediationDataset(
        z=scaled[:, 0],
        m=scaled[:, 1:-1],
        r=scaled[:, -1],
        column_names=dataset.column_names,
    )
    return StandardizedDataset(standardized, centers, scales)


def back_transform(coefs, standardized):
    """Map standardized-scale coefficients back to the raw data scale."""
    _check_dimensions(standardized, coefs)
    sd_z = standardized.scales[0]
    sd_m = standardized.scales[1:-1]
    sd_r = standardized.scales[-1]
    return PathwayCoefficients(
        a=coefs.a * sd_m / sd_z,
        b=coefs.b * sd_r / sd_m,
        c=coefs.c * sd_r / sd_z,
    )


def penalty_masks(k, spec):
    """J = (0, 1, ..., 1) and Phi = phi * J over the K + 1 coordinates (0 is C)."""
    j_mask = np.ones(k + 1)
    j_mask[0] = 0.0
    return j_mask, spec.phi * j_mask


def augmented_design(dataset, spec):
    """Build X = (Z M) together with e1, J, Phi and diag{0, W1}."""
    k = dataset.k
    e1 = np.zeros(k + 1)
    e1[0] = 1.0
    j_mask, phi_mask = penalty_masks(k, spec)
    return AugmentedDesign(
        x=np.column_stack([dataset.z, dataset.m]),
        e1=e1,
        j_mask=j_mask,
        phi_mask=phi_mask,
        omega1=np.concatenate([[0.0], spec.weights(k)]),
    )


def loss(dataset, coefs, spec):
    """
    Weighted squared error of both model blocks:
    tr[W1 (M - ZA)'(M - ZA)] + w2 (R - ZC - MB)'(R - ZC - MB).
    """
    _check_dimensions(dataset, coefs)
    mediator_residual = dataset.m - np.outer(dataset.z, coefs.a)
    outcome_residual = dataset.r - dataset.z * coefs.c - dataset.m @ coefs.b
    weights = spec.weights(dataset.k)
    mediator_term = float(np.sum(weights * np.sum(mediator_residual ** 2, axis=0)))
    outcome_term = spec.w2 * float(outcome_residual @ outcome_residual)
    return mediator_term + outcome_term


def penalty_p1(coefs, phi):
    """sum_j (|A_j B_j| + phi (A_j^2 + B_j^2)) + |C|."""
    if phi < 0:
        raise ValueError('phi must be non-negative')
    a, b = coefs.a, coefs.b
    return float(np.sum(np.abs(a * b) + phi * (a ** 2 + b ** 2)) + abs(coefs.c))


def penalty_p2(coefs):
    """sum_j (|A_j| + |B_j|); the direct effect is not penalized here."""
    return float(np.sum(np.abs(coefs.a)) + np.sum(np.abs(coefs.b)))


def objective(dataset, coefs, spec):
    """Penalized criterion loss/2 + lambda * P1 + omega * P2."""
    value = loss(dataset, coefs, spec) / 2.0
    value += spec.lam * penalty_p1(coefs, spec.phi)
    value += spec.omega * penalty_p2(coefs)
    return value


def pathway_effects(coefs):
    """
    Per-pathway effects and the total indirect effect.

    Returns:
        tuple: (array of A_j B_j, sum over j)
    """
    ab = coefs.a * coefs.b
    return ab, float(np.sum(ab))


def total_effect(dataset):
    """
    Least-squares slope of R on Z.

    Standardized data are centered, so the fit has no intercept; raw data get
    one.

    Raises:
        ValueError: If Z is constant
    """
    z, r = dataset.z, dataset.r
    if isinstance(dataset, StandardizedDataset):
        denominator = float(z @ z)
        numerator = float(z @ r)
    else:
        zc = z - z.mean()
        denominator = float(zc @ zc)
        numerator = float(zc @ (r - r.mean()))
    if denominator == 0:
        raise ValueError("constant column 'Z': total effect undefined")
    return numerator / denominator
