from dataclasses import dataclass, field
from typing import Optional, Tuple
import enum

import numpy as np

from pathlasso.config import Config
from pathlasso.models.coefficients import PathwayCoefficients
from pathlasso.models.dataset import AugmentedDesign
from pathlasso.models.penalty import PenaltySpec
from pathlasso.utils.validators import validate_numeric_range, validate_positive_integer


class Method(enum.Enum):
    """Estimation methods compared in the pipeline."""
    pathlasso = 'PathLasso'
    tslasso = 'TSLasso'
    bk = 'BK'


@dataclass(frozen=True)
class SolverOptions:
    """Stopping rule and augmented-Lagrangian parameter."""

    max_iter: int = 10000
    tol_primal: float = 1e-6
    tol_change: float = 1e-8
    rho: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'max_iter', validate_positive_integer(self.max_iter, 'max_iter'))
        for name in ('tol_primal', 'tol_change', 'rho'):
            value = validate_numeric_range(getattr(self, name), name, min_val=0.0, min_inclusive=False)
            object.__setattr__(self, name, value)

    @classmethod
    def from_config(cls, config=Config):
        return cls(
            max_iter=config.MAX_ITER,
            tol_primal=config.TOL_PRIMAL,
            tol_change=config.TOL_CHANGE,
            rho=config.RHO,
        )

    def to_dict(self):
        return {
            'max_iter': self.max_iter,
            'tol_primal': self.tol_primal,
            'tol_change': self.tol_change,
            'rho': self.rho,
        }


@dataclass(frozen=True, eq=False)
class AdmmState:
    """Iterate of the augmented-Lagrangian scheme.

    theta = (1, A_1..A_K) and d = (C, B_1..B_K) are the smooth blocks, alpha
    and beta their penalized copies, nu1/nu2/nu3 the multipliers of
    theta = alpha, d = beta and theta[0] = 1.
    """

    theta: np.ndarray
    d: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    nu1: np.ndarray
    nu2: np.ndarray
    nu3: float
    rho: float
    iteration: int = 0

    @classmethod
    def initial(cls, k, rho=1.0):
        """Theta = (1, 0, ..., 0), D = 0, alpha = Theta, beta = D, nu = 0."""
        theta = np.zeros(k + 1)
        theta[0] = 1.0
        return cls(
            theta=theta,
            d=np.zeros(k + 1),
            alpha=theta.copy(),
            beta=np.zeros(k + 1),
            nu1=np.zeros(k + 1),
            nu2=np.zeros(k + 1),
            nu3=0.0,
            rho=float(rho),
        )

    @property
    def k(self):
        return self.theta.shape[0] - 1

    def primal_residual(self):
        """max(|theta - alpha|_inf, |d - beta|_inf, |theta[0] - 1|)."""
        return max(
            float(np.max(np.abs(self.theta - self.alpha))),
            float(np.max(np.abs(self.d - self.beta))),
            abs(float(self.theta[0]) - 1.0),
        )

    def coefficients(self):
        """Coefficients read from the penalized blocks, whose zeros are exact."""
        return PathwayCoefficients(self.alpha[1:], self.beta[1:], float(self.beta[0]))

    def to_dict(self):
        return {
            'theta': self.theta.tolist(),
            'd': self.d.tolist(),
            'alpha': self.alpha.tolist(),
            'beta': self.beta.tolist(),
            'nu1': self.nu1.tolist(),
            'nu2': self.nu2.tolist(),
            'nu3': self.nu3,
            'rho': self.rho,
            'iteration': self.iteration,
        }


@dataclass(frozen=True, eq=False)
class Precomp:
    """Quantities reused by every sweep at a fixed (data, spec, rho)."""

    ztx: np.ndarray
    ztz: float
    omega1: np.ndarray
    theta_diag: np.ndarray
    d_factor: Tuple[np.ndarray, bool]
    d_matrix: np.ndarray
    w2xtr: np.ndarray
    rho: float
    design: Optional[AugmentedDesign] = None


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of one solver run."""

    coefs: PathwayCoefficients
    state: AdmmState
    converged: bool
    iterations: int
    objective: float
    spec: PenaltySpec
    primal_residual: float = float('nan')

    def to_dict(self):
        return {
            **self.spec.to_dict(),
            'converged': self.converged,
            'iterations': self.iterations,
            'objective': self.objective,
            'primal_residual': self.primal_residual,
            **self.coefs.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class PathResult:
    """Fits along a tuning grid, sorted by decreasing lambda (or omega)."""

    grid: Tuple[PenaltySpec, ...]
    fits: Tuple[FitResult, ...]
    method: Method = Method.pathlasso
    cutoff: float = 1e-3
    column_names: Optional[Tuple[str, ...]] = None
    label: str = field(default='')

    def __post_init__(self):
        if len(self.grid) != len(self.fits):
            raise ValueError('grid and fits must be aligned')
        object.__setattr__(self, 'grid', tuple(self.grid))
        object.__setattr__(self, 'fits', tuple(self.fits))
        if not self.label:
            object.__setattr__(self, 'label', self.method.value)

    def __len__(self):
        return len(self.fits)

    @property
    def varies_omega(self):
        lams = {spec.lam for spec in self.grid}
        return len(lams) == 1 and len(self.grid) > 1

    @property
    def grid_values(self):
        """The tuning value that moves along the path (lambda, or omega when
        lambda is held fixed as for the two-stage lasso)."""
        if self.varies_omega:
            return np.array([spec.omega for spec in self.grid])
        return np.array([spec.lam for spec in self.grid])

    @property
    def pathway_effects(self):
        """Matrix (grid points x K) of estimated a_j b_j."""
        return np.vstack([fit.coefs.ab for fit in self.fits])

    @property
    def selected_sets(self):
        return [frozenset(int(j) + 1 for j in np.flatnonzero(np.abs(ab) > self.cutoff))
                for ab in self.pathway_effects]

    @property
    def l1_norms(self):
        return np.abs(self.pathway_effects).sum(axis=1)

    @property
    def all_converged(self):
        return all(fit.converged for fit in self.fits)

    def to_dict(self):
        return {
            'method': self.method.value,
            'label': self.label,
            'cutoff': self.cutoff,
            'points': len(self),
            'all_converged': self.all_converged,
            'grid_values': self.grid_values.tolist(),
            'support_sizes': [len(s) for s in self.selected_sets],
            'l1_norms': self.l1_norms.tolist(),
        }
