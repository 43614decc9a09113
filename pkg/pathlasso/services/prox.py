"""
Closed-form solution of the pairwise subproblem

    minimize  lam*|ab| + omega*|a| + omega*|b| + phi1*a^2/2 + phi2*b^2/2 - mu1*a - mu2*b

and the pairwise penalty v(a, b) = |ab| + phi*(a^2 + b^2).

With lam = 0 the problem separates into two soft-thresholding steps. With
lam > 0 and min(phi1, phi2) > lam it is convex and exactly one of seven
branch conditions selects the minimizer: (1)-(4) the stationary points in the
four open quadrants, (5)-(6) a single nonzero coordinate, (7) the origin.
With omega = 0 the same conditions reduce to the product-only table and are
reported with the numbering above. Outside the convex regime the minimizer
is still attained at one of those seven candidates, so the candidate with
the smallest objective is returned.
"""
import logging

import numpy as np

from pathlasso.models import ProxSolution

logger = logging.getLogger(__name__)

ENUMERATED = -1
SOFT_THRESHOLD = 0


def soft_threshold(mu, omega):
    """
    S_omega(mu) = max(|mu| - omega, 0) * sgn(mu).

    Works elementwise on arrays; returns a float for scalar input.
    """
    if np.any(np.asarray(omega) < 0):
        raise ValueError('omega must be non-negative')
    value = np.sign(mu) * np.maximum(np.abs(mu) - omega, 0.0)
    if np.ndim(value) == 0:
        return float(value)
    return value


def penalty_v(a, b, phi):
    """v(a, b) = |ab| + phi (a^2 + b^2)."""
    return np.abs(a * b) + phi * (a ** 2 + b ** 2)


def penalty_v_max_form(a, b, phi):
    """Equivalent form max{(a+b)^2/2, (a-b)^2/2} + (phi - 1/2)(a^2 + b^2)."""
    return np.maximum(0.5 * (a + b) ** 2, 0.5 * (a - b) ** 2) + (phi - 0.5) * (a ** 2 + b ** 2)


def convexity_gap(first, second, t, phi):
    """
    v(t*p1 + (1-t)*p2) - [t v(p1) + (1-t) v(p2)] for points p = (a, b).

    Non-positive for every pair exactly when v is convex.
    """
    a1, b1 = first
    a2, b2 = second
    a_mid = t * np.asarray(a1) + (1 - t) * np.asarray(a2)
    b_mid = t * np.asarray(b1) + (1 - t) * np.asarray(b2)
    chord = t * penalty_v(a1, b1, phi) + (1 - t) * penalty_v(a2, b2, phi)
    return penalty_v(a_mid, b_mid, phi) - chord


def pair_objective(lam, omega, phi1, phi2, mu1, mu2, a, b):
    """Objective of the pairwise subproblem, elementwise."""
    return (lam * np.abs(a * b) + omega * (np.abs(a) + np.abs(b))
            + 0.5 * phi1 * a ** 2 + 0.5 * phi2 * b ** 2 - mu1 * a - mu2 * b)


def _conditions(lam, omega, phi1, phi2, mu1, mu2):
    """Boolean matrix (n x 7) of the branch conditions, strict as written."""
    slack1 = omega * (phi2 - lam)
    slack2 = omega * (phi1 - lam)
    c1 = (phi2 * mu1 - lam * mu2 > slack1) & (phi1 * mu2 - lam * mu1 > slack2)
    c2 = (phi2 * mu1 + lam * mu2 > slack1) & (phi1 * mu2 + lam * mu1 < -slack2)
    c3 = (phi2 * mu1 + lam * mu2 < -slack1) & (phi1 * mu2 + lam * mu1 > slack2)
    c4 = (phi2 * mu1 - lam * mu2 < -slack1) & (phi1 * mu2 - lam * mu1 < -slack2)
    c5 = (np.abs(mu1) > omega) & (phi1 * np.abs(mu2) - lam * np.abs(mu1) <= slack2)
    c6 = (np.abs(mu2) > omega) & (phi2 * np.abs(mu1) - lam * np.abs(mu2) <= slack1)
    c7 = ~(c1 | c2 | c3 | c4 | c5 | c6)
    return np.column_stack([c1, c2, c3, c4, c5, c6, c7])


def _candidates(lam, omega, phi1, phi2, mu1, mu2):
    """Branch solutions (n x 7 for a and for b) and whether each is defined."""
    det = phi1 * phi2 - lam ** 2
    defined_quadrant = det > 0
    safe_det = np.where(defined_quadrant, det, 1.0)

    x = np.column_stack([
        phi2 * (mu1 - omega) - lam * (mu2 - omega),
        phi2 * (mu1 - omega) + lam * (mu2 + omega),
        phi2 * (mu1 + omega) + lam * (mu2 - omega),
        phi2 * (mu1 + omega) - lam * (mu2 + omega),
    ])
    y = np.column_stack([
        phi1 * (mu2 - omega) - lam * (mu1 - omega),
        phi1 * (mu2 + omega) + lam * (mu1 - omega),
        phi1 * (mu2 - omega) + lam * (mu1 + omega),
        phi1 * (mu2 + omega) - lam * (mu1 + omega),
    ])
    zeros = np.zeros_like(mu1)
    axis_a = soft_threshold(mu1, omega) / phi1
    axis_b = soft_threshold(mu2, omega) / phi2

    a = np.column_stack([x / safe_det[:, None], axis_a, zeros, zeros])
    b = np.column_stack([y / safe_det[:, None], zeros, axis_b, zeros])
    defined = np.column_stack([np.repeat(defined_quadrant[:, None], 4, axis=1),
                               np.ones((mu1.shape[0], 3), dtype=bool)])
    return a, b, defined


def prox_pair_vec(lam, omega, phi1, phi2, mu1, mu2):
    """
    Solve many pairwise subproblems sharing one lam.

    Args:
        lam: Product-penalty weight (scalar, >= 0)
        omega, phi1, phi2, mu1, mu2: Arrays (or scalars) broadcast together

    Returns:
        tuple: (a, b, condition) arrays; condition is 1..7 for the branch
        taken in the convex regime, 0 for lam = 0 and -1 where the
        candidates had to be enumerated
    """
    lam = float(lam)
    omega, phi1, phi2, mu1, mu2 = (np.atleast_1d(np.asarray(v, dtype=float))
                                   for v in np.broadcast_arrays(omega, phi1, phi2, mu1, mu2))
    if lam < 0 or np.any(omega < 0):
        raise ValueError('lam and omega must be non-negative')
    if np.any(phi1 <= 0) or np.any(phi2 <= 0):
        raise ValueError('phi1 and phi2 must be positive')
    if not (np.all(np.isfinite(mu1)) and np.all(np.isfinite(mu2)) and np.isfinite(lam)):
        raise ValueError('prox inputs must be finite')

    if lam == 0:
        a = soft_threshold(mu1, omega) / phi1
        b = soft_threshold(mu2, omega) / phi2
        return a, b, np.full(a.shape, SOFT_THRESHOLD, dtype=int)

    a_cand, b_cand, defined = _candidates(lam, omega, phi1, phi2, mu1, mu2)
    convex = np.minimum(phi1, phi2) > lam
    if not convex.all():
        logger.debug('enumerating candidates for %d of %d subproblems', int((~convex).sum()), convex.size)
    admissible = np.where(convex[:, None], _conditions(lam, omega, phi1, phi2, mu1, mu2), defined)

    values = pair_objective(lam, omega[:, None], phi1[:, None], phi2[:, None],
                            mu1[:, None], mu2[:, None], a_cand, b_cand)
    values = np.where(admissible, values, np.inf)

    # ties go to the candidate with more zero coordinates, then the lower branch
    best = values.min(axis=1)
    nonzero = (a_cand != 0).astype(int) + (b_cand != 0).astype(int)
    score = np.where(values == best[:, None], 2 - nonzero, -1)
    choice = np.argmax(score, axis=1)

    rows = np.arange(choice.shape[0])
    a = a_cand[rows, choice]
    b = b_cand[rows, choice]
    condition = np.where(convex, choice + 1, ENUMERATED)
    return a, b, condition


def prox_pair(params):
    """
    Global minimizer of one pairwise subproblem.

    Args:
        params: ProxParams

    Returns:
        ProxSolution: (a, b) and the branch used
    """
    a, b, condition = prox_pair_vec(params.lam, params.omega, params.phi1, params.phi2,
                                    params.mu1, params.mu2)
    return ProxSolution(a=float(a[0]), b=float(b[0]), condition_id=int(condition[0]))


def branch_conditions(params):
    """The seven branch conditions evaluated for one ProxParams."""
    return _conditions(params.lam, params.omega, params.phi1, params.phi2,
                       np.atleast_1d(params.mu1), np.atleast_1d(params.mu2))[0]


def objective_at(params, a, b):
    """Subproblem objective at (a, b)."""
    return float(pair_objective(params.lam, params.omega, params.phi1, params.phi2,
                                params.mu1, params.mu2, a, b))


__all__ = [
    'soft_threshold', 'penalty_v', 'penalty_v_max_form', 'convexity_gap',
    'pair_objective', 'prox_pair', 'prox_pair_vec', 'branch_conditions',
    'objective_at',
]
