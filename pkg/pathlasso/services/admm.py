"""
ADMM service - augmented-Lagrangian solver for the pathway lasso criterion
and warm-started regularization paths.

Variables: theta = (1, A_1..A_K), d = (C, B_1..B_K), their penalized copies
alpha and beta, and multipliers nu1, nu2 (vectors) and nu3 (scalar) for the
constraints theta = alpha, d = beta, theta[0] = 1. Each sweep updates theta,
then d, then (alpha, beta), then the multipliers.
"""
import dataclasses
import logging

import numpy as np
import pandas as pd
from scipy import linalg

from pathlasso.config import Config
from pathlasso.models import (
    AdmmState, FitResult, Method, OmegaRule, PathResult, PenaltySpec, Precomp,
    SolverOptions, StandardizedDataset,
)
from pathlasso.services.core import augmented_design, objective, penalty_masks
from pathlasso.services.prox import prox_pair_vec

logger = logging.getLogger(__name__)


def precompute(dataset, spec, rho):
    """
    Cache the data products and the factorization used by every sweep.

    Args:
        dataset: Standardized dataset
        spec: PenaltySpec (supplies W1 and w2)
        rho: Augmented-Lagrangian parameter

    Returns:
        Precomp: Z'X, Z'Z, the diagonal of the theta system
        Z'Z*diag{0, W1} + 2rho(I + e1e1') and a Cholesky factor of
        w2 X'X + 2rho I
    """
    if rho <= 0:
        raise ValueError('rho must be positive')
    k = dataset.k
    design = augmented_design(dataset, spec)
    x = design.x
    ztx = dataset.z @ x
    ztz = float(dataset.z @ dataset.z)
    omega1 = design.omega1

    theta_diag = ztz * omega1 + 2.0 * rho
    theta_diag[0] += 2.0 * rho

    d_matrix = spec.w2 * (x.T @ x) + 2.0 * rho * np.eye(k + 1)
    try:
        d_factor = linalg.cho_factor(d_matrix, lower=True)
    except linalg.LinAlgError as exc:
        raise RuntimeError(f'internal error: D-update system is not positive definite ({exc})')

    return Precomp(
        ztx=ztx,
        ztz=ztz,
        omega1=omega1,
        theta_diag=theta_diag,
        d_factor=d_factor,
        d_matrix=d_matrix,
        w2xtr=spec.w2 * (x.T @ dataset.r),
        rho=float(rho),
        design=design,
    )


def update_theta(state, precomp):
    """Exact minimizer of the augmented Lagrangian over theta."""
    rho = precomp.rho
    rhs = precomp.ztx * precomp.omega1 - state.nu1 + 2.0 * rho * state.alpha
    rhs[0] += 2.0 * rho - state.nu3
    return rhs / precomp.theta_diag


def update_d(state, precomp):
    """Exact minimizer of the augmented Lagrangian over d."""
    rhs = precomp.w2xtr - state.nu2 + 2.0 * precomp.rho * state.beta
    return linalg.cho_solve(precomp.d_factor, rhs)


def _subproblem_inputs(state, spec, design=None):
    rho = state.rho
    if design is None:
        j_mask, phi_mask = penalty_masks(state.k, spec)
    else:
        j_mask, phi_mask = design.j_mask, design.phi_mask
    phi = 2.0 * spec.lam * phi_mask + 2.0 * rho
    mu1 = 2.0 * rho * state.theta + state.nu1
    mu2 = 2.0 * rho * state.d + state.nu2
    return spec.omega * j_mask, phi, mu1, mu2


def update_alpha_beta(state, spec, design=None):
    """
    Coordinatewise pairwise prox for (alpha_j, beta_j).

    Coordinate 0 carries the direct effect and only the lam*|alpha_0 beta_0|
    term; the others get phi_j = 2 lam phi + 2 rho and l1 weight omega.
    The masks come from design (an AugmentedDesign) when given.
    """
    omega, phi, mu1, mu2 = _subproblem_inputs(state, spec, design)
    alpha, beta, _ = prox_pair_vec(spec.lam, omega, phi, phi, mu1, mu2)
    return alpha, beta


def update_duals(state):
    """Multiplier ascent nu_r += 2 rho h_r."""
    step = 2.0 * state.rho
    return dataclasses.replace(
        state,
        nu1=state.nu1 + step * (state.theta - state.alpha),
        nu2=state.nu2 + step * (state.d - state.beta),
        nu3=state.nu3 + step * (float(state.theta[0]) - 1.0),
        iteration=state.iteration + 1,
    )


def fit(dataset, spec, opts=None, init=None):
    """
    Minimize the penalized criterion for one PenaltySpec.

    Args:
        dataset: StandardizedDataset
        spec: PenaltySpec
        opts: SolverOptions (defaults from Config)
        init: Optional AdmmState to start from

    Returns:
        FitResult: Coefficients read from (alpha, beta), the final state and
        the objective at those coefficients; converged is False when
        max_iter was reached

    With lam >= 2 rho the direct-effect subproblem is non-convex; the
    iteration then usually stalls and the result comes back unconverged.
    """
    if not isinstance(dataset, StandardizedDataset):
        raise ValueError('fit requires standardized data; call standardize() first')
    opts = opts or SolverOptions.from_config(Config)
    k = dataset.k

    if init is None:
        state = AdmmState.initial(k, opts.rho)
    else:
        if init.k != k:
            raise ValueError(f'initial state has {init.k} mediators, dataset has {k}')
        state = dataclasses.replace(init, rho=opts.rho, iteration=0)

    precomp = precompute(dataset, spec, opts.rho)
    converged = False
    residual = state.primal_residual()

    for _ in range(opts.max_iter):
        previous = state
        state = dataclasses.replace(state, theta=update_theta(state, precomp))
        state = dataclasses.replace(state, d=update_d(state, precomp))
        alpha, beta = update_alpha_beta(state, spec, precomp.design)
        state = update_duals(dataclasses.replace(state, alpha=alpha, beta=beta))

        change = max(
            float(np.max(np.abs(state.theta - previous.theta))),
            float(np.max(np.abs(state.d - previous.d))),
            float(np.max(np.abs(state.alpha - previous.alpha))),
            float(np.max(np.abs(state.beta - previous.beta))),
        )
        residual = state.primal_residual()
        if residual <= opts.tol_primal and change <= opts.tol_change:
            converged = True
            break

    coefs = state.coefficients()
    value = objective(dataset, coefs, spec)
    if converged:
        logger.debug('lambda=%g omega=%g converged in %d sweeps', spec.lam, spec.omega, state.iteration)
    else:
        logger.warning('lambda=%g omega=%g did not converge in %d sweeps (residual %.3g)',
                       spec.lam, spec.omega, opts.max_iter, residual)

    return FitResult(
        coefs=coefs,
        state=state,
        converged=converged,
        iterations=state.iteration,
        objective=value,
        spec=spec,
        primal_residual=residual,
    )


def _check_path_grid(specs, ordered=True):
    if not specs:
        raise ValueError('path needs at least one PenaltySpec')
    first = specs[0]
    for spec in specs[1:]:
        if (spec.phi, spec.w1, spec.w2) != (first.phi, first.w1, first.w2):
            raise ValueError('path specs must share phi and loss weights')
    if not ordered:
        return
    lams = np.array([spec.lam for spec in specs])
    omegas = np.array([spec.omega for spec in specs])
    if np.all(lams == lams[0]):
        if np.any(np.diff(omegas) > 0):
            raise ValueError('with lambda fixed the grid must be sorted by decreasing omega')
    elif np.any(np.diff(lams) > 0):
        raise ValueError('path grid must be sorted by decreasing lambda')


def fit_path(dataset, specs, opts=None, warm_start=True, method=Method.pathlasso,
             cutoff=None, label=''):
    """
    Fit a sequence of specs, each starting from the last converged
    solution (cold until one converges).

    Args:
        dataset: StandardizedDataset
        specs: PenaltySpecs sorted by decreasing lambda (or decreasing omega
            when lambda is fixed)
        opts: SolverOptions
        warm_start: When False every point starts cold and the grid may be
            in any order
        method: Method tag stored on the result
        cutoff: Selection cutoff for |a_j b_j| (default Config.SELECTION_CUTOFF)
        label: Display label, e.g. 'PathLasso(omega=0.1lambda)'

    Returns:
        PathResult
    """
    specs = list(specs)
    _check_path_grid(specs, ordered=warm_start)
    opts = opts or SolverOptions.from_config(Config)
    cutoff = Config.SELECTION_CUTOFF if cutoff is None else cutoff

    fits = []
    state = None
    for spec in specs:
        result = fit(dataset, spec, opts, init=state if warm_start else None)
        fits.append(result)
        if result.converged:
            state = result.state

    unconverged = sum(not f.converged for f in fits)
    if unconverged:
        logger.warning('%d of %d path points did not converge', unconverged, len(fits))
    return PathResult(grid=tuple(specs), fits=tuple(fits), method=method, cutoff=cutoff,
                      column_names=dataset.column_names, label=label)


def build_grid(lambda_min=None, lambda_max=None, n_lambda=None, omega_rule=OmegaRule.zero,
               omega=0.0, phi=None, w1=None, w2=1.0):
    """
    Log-spaced lambda grid, largest first, with omega set by the rule.

    Returns:
        list: PenaltySpec per grid point
    """
    lambda_min = Config.LAMBDA_MIN if lambda_min is None else lambda_min
    lambda_max = Config.LAMBDA_MAX if lambda_max is None else lambda_max
    n_lambda = Config.N_LAMBDA if n_lambda is None else n_lambda
    phi = Config.PHI if phi is None else phi
    omega_rule = OmegaRule(omega_rule)
    if not 0 < lambda_min <= lambda_max:
        raise ValueError('lambda grid needs 0 < lambda_min <= lambda_max')
    if n_lambda < 1:
        raise ValueError('n_lambda must be positive')

    if n_lambda == 1:
        lams = np.array([lambda_max])
    else:
        lams = np.logspace(np.log10(lambda_max), np.log10(lambda_min), n_lambda)
    base = PenaltySpec(lam=0.0, phi=phi, w1=w1, w2=w2)
    return [base.with_tuning(lam=float(lam), omega=omega_rule.omega_for(float(lam), omega)) for lam in lams]


def build_omega_grid(omega_min=None, omega_max=None, n_omega=None, phi=None, w1=None, w2=1.0):
    """Log-spaced omega grid, largest first, with lambda = 0."""
    omega_min = Config.LAMBDA_MIN if omega_min is None else omega_min
    omega_max = Config.LAMBDA_MAX if omega_max is None else omega_max
    n_omega = Config.N_LAMBDA if n_omega is None else n_omega
    phi = Config.PHI if phi is None else phi
    if not 0 < omega_min <= omega_max:
        raise ValueError('omega grid needs 0 < omega_min <= omega_max')
    if n_omega == 1:
        omegas = np.array([omega_max])
    else:
        omegas = np.logspace(np.log10(omega_max), np.log10(omega_min), n_omega)
    base = PenaltySpec(lam=0.0, phi=phi, w1=w1, w2=w2)
    return [base.with_tuning(omega=float(w)) for w in omegas]


def prox_audit(state, spec, design=None):
    """
    The (params, branch, solution) triples of one more (alpha, beta) update
    at the given state, one row per coordinate (coordinate 0 is C).
    """
    omega, phi, mu1, mu2 = _subproblem_inputs(state, spec, design)
    alpha, beta, condition = prox_pair_vec(spec.lam, omega, phi, phi, mu1, mu2)
    return pd.DataFrame({
        'coordinate': np.arange(state.k + 1),
        'lambda': spec.lam,
        'omega': omega,
        'phi1': phi,
        'phi2': phi,
        'mu1': mu1,
        'mu2': mu2,
        'condition': condition,
        'a': alpha,
        'b': beta,
    })
