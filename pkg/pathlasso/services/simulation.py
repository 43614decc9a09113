"""
Simulation service - synthetic mediation datasets under the marginal model
(structured error covariance) and the sequential model (mediator adjacency
delta), plus the influence transform between the two.

Randomness: a design seed s is split with numpy.random.SeedSequence(s).spawn(3)
into independent streams for coefficients, covariance pairs and data draws.
Replicate r of a study seeded with S uses the integer seed drawn from the r-th
child of SeedSequence(S).
"""
import logging

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg

from pathlasso.models import (
    FullModelDesign, MediationDataset, SimulationDesign, Treatment, TruthRecord,
)
from pathlasso.utils.validators import validate_numeric_range, validate_positive_integer

logger = logging.getLogger(__name__)

COEFFICIENT_STREAM, COVARIANCE_STREAM, DATA_STREAM = range(3)


def _stream(seed, which):
    return np.random.default_rng(np.random.SeedSequence(seed).spawn(3)[which])


def replicate_seeds(seed, reps):
    """Independent integer seeds for reps replicates of a study."""
    children = np.random.SeedSequence(seed).spawn(reps)
    return [int(child.generate_state(1)[0]) for child in children]


def make_sigma1(k, rho_m, seed=0):
    """
    Sparse mediator error covariance: identity plus rho_m on floor((K-1)/2)
    disjoint random index pairs. Disjoint pairs keep the eigenvalues at
    1 +/- |rho_m| (and 1).

    Raises:
        ValueError: If |rho_m| >= 1
    """
    k = validate_positive_integer(k, 'k')
    rho_m = validate_numeric_range(rho_m, 'rho_m', -1.0, 1.0, min_inclusive=False, max_inclusive=False)
    rng = np.random.default_rng(seed)
    n_pairs = (k - 1) // 2
    pairs = rng.permutation(k)[:2 * n_pairs].reshape(n_pairs, 2)
    sigma = np.eye(k)
    sigma[pairs[:, 0], pairs[:, 1]] = rho_m
    sigma[pairs[:, 1], pairs[:, 0]] = rho_m
    return sigma


def _sigma1_spec(sigma, rho_m):
    rows, cols = np.nonzero(np.triu(sigma, 1))
    return {
        'type': 'sparse-pairs' if rho_m is not None else 'explicit',
        'rho_m': rho_m,
        'pairs': [[int(i) + 1, int(j) + 1, float(sigma[i, j])] for i, j in zip(rows, cols)],
        'diagonal': np.diag(sigma).tolist(),
    }


def default_design(n, k, rho_m=0.0, seed=0, treatment=Treatment.normal, c_true=1.0, sigma2=1.0):
    """
    The default data-generating process: s = max(3, K // 10) true pathways
    (capped at K) with a_j and b_j drawn from +/-[1, 2] with independent
    signs, every other coefficient zero.
    """
    k = validate_positive_integer(k, 'k')
    rng = _stream(seed, COEFFICIENT_STREAM)
    s = min(k, max(3, k // 10))
    active = np.sort(rng.choice(k, size=s, replace=False))
    a_true = np.zeros(k)
    b_true = np.zeros(k)
    a_true[active] = rng.uniform(1.0, 2.0, s) * rng.choice([-1.0, 1.0], s)
    b_true[active] = rng.uniform(1.0, 2.0, s) * rng.choice([-1.0, 1.0], s)
    sigma1 = make_sigma1(k, rho_m, np.random.SeedSequence(seed).spawn(3)[COVARIANCE_STREAM])
    return SimulationDesign(n=n, k=k, a_true=a_true, b_true=b_true, sigma1=sigma1,
                            c_true=c_true, sigma2=sigma2, seed=seed, treatment=treatment,
                            rho_m=rho_m)


def _draw_treatment(rng, n, treatment):
    if Treatment(treatment) is Treatment.binary:
        return rng.permutation(np.resize([1.0, -1.0], n))
    return rng.standard_normal(n)


def _outcome(rng, z, m, b_true, c_true, sigma2):
    noise = sigma2 * rng.standard_normal(z.shape[0])
    return z * c_true + m @ b_true + noise


def gen_proposed(design):
    """
    Draw a dataset from M = Z a + E1, R = Z c + M b + E2 with rows of E1
    i.i.d. N(0, sigma1) and E2 ~ N(0, sigma2^2 I).

    Returns:
        tuple: (MediationDataset, TruthRecord)
    """
    rng = _stream(design.seed, DATA_STREAM)
    z = _draw_treatment(rng, design.n, design.treatment)
    noise = rng.standard_normal((design.n, design.k))
    sigma = design.sigma1
    if np.count_nonzero(sigma - np.diag(np.diag(sigma))) == 0:
        e1 = noise * np.sqrt(np.diag(sigma))
    else:
        e1 = noise @ np.linalg.cholesky(sigma).T
    m = np.outer(z, design.a_true) + e1
    r = _outcome(rng, z, m, design.b_true, design.c_true, design.sigma2)

    truth = TruthRecord(
        a_true=np.array(design.a_true),
        b_true=np.array(design.b_true),
        c_true=design.c_true,
        seed=design.seed,
        sigma1_spec=_sigma1_spec(sigma, design.rho_m),
    )
    return MediationDataset(z, m, r), truth


def _check_strictly_upper(delta):
    delta = np.asarray(delta, dtype=float)
    if delta.ndim != 2 or delta.shape[0] != delta.shape[1]:
        raise ValueError('delta must be a square matrix')
    if np.any(np.tril(delta) != 0):
        raise ValueError('delta must be strictly upper triangular')
    return delta


def influence_transform(a, delta):
    """
    Marginal effects A = a (I - delta)^-1 for a strictly upper-triangular
    delta, by triangular substitution.
    """
    delta = _check_strictly_upper(delta)
    a = np.asarray(a, dtype=float)
    if a.shape[0] != delta.shape[0]:
        raise ValueError('a and delta dimensions differ')
    # x (I - delta) = a  <=>  (I - delta)' x' = a'
    return linalg.solve_triangular(np.eye(a.shape[0]) - delta, a, trans='T', lower=False)


def random_delta(k, density, value, seed=0):
    """Strictly upper-triangular delta with each entry set to value with probability density."""
    density = validate_numeric_range(density, 'delta density', 0.0, 1.0)
    rng = np.random.default_rng(seed)
    mask = np.triu(rng.random((k, k)) < density, 1)
    return np.where(mask, float(value), 0.0)


def gen_full(design):
    """
    Draw a dataset from the sequential model
    M_j = Z a_j + sum_{l<j} M_l delta_lj + eps_j, R = Z c + M b + E2.

    Returns:
        tuple: (MediationDataset, TruthRecord) where the truth carries the
        induced marginal a(I - delta)^-1 as a_true along with a and delta
    """
    delta = _check_strictly_upper(design.delta)
    rng = _stream(design.seed, DATA_STREAM)
    z = _draw_treatment(rng, design.n, design.treatment)
    eps = rng.standard_normal((design.n, design.k)) * np.sqrt(design.xi)
    m = np.zeros((design.n, design.k))
    for j in range(design.k):
        m[:, j] = z * design.a_small[j] + m[:, :j] @ delta[:j, j] + eps[:, j]
    r = _outcome(rng, z, m, design.b_true, design.c_true, design.sigma2)

    truth = TruthRecord(
        a_true=influence_transform(design.a_small, delta),
        b_true=np.array(design.b_true),
        c_true=design.c_true,
        seed=design.seed,
        sigma1_spec={'type': 'sequential', 'xi': design.xi.tolist()},
        a_small=np.array(design.a_small),
        delta=np.array(delta),
    )
    return MediationDataset(z, m, r), truth


def simulate_replicates(n, k, rho_m=0.0, reps=1, seed=0, treatment=Treatment.normal,
                        delta_density=0.0, delta_value=0.0, threads=1):
    """
    Generate reps independent datasets under the default coefficients.

    With delta_density > 0 the sequential model is used with a random delta
    and unit error variances; otherwise the marginal model with the sparse
    sigma1 of correlation rho_m.

    Returns:
        list: (MediationDataset, TruthRecord) per replicate, in replicate order
    """
    reps = validate_positive_integer(reps, 'reps')
    seeds = replicate_seeds(seed, reps)
    logger.info('simulating %d replicates (n=%d, K=%d, rho_m=%g)', reps, n, k, rho_m)
    return Parallel(n_jobs=threads)(
        delayed(_one_replicate)(n, k, rho_m, s, treatment, delta_density, delta_value) for s in seeds
    )


def _one_replicate(n, k, rho_m, seed, treatment, delta_density, delta_value):
    design = default_design(n, k, rho_m=rho_m, seed=seed, treatment=treatment)
    if delta_density > 0:
        full = FullModelDesign(
            n=n, k=k, a_small=design.a_true, b_true=design.b_true,
            delta=random_delta(k, delta_density, delta_value, seed),
            xi=np.ones(k), c_true=design.c_true, sigma2=design.sigma2, seed=seed,
            treatment=treatment,
        )
        return gen_full(full)
    return gen_proposed(design)
