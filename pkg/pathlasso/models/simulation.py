from dataclasses import dataclass, field
from typing import FrozenSet, Optional
import enum

import numpy as np

from pathlasso.utils.validators import (
    validate_finite, validate_numeric_range, validate_positive_integer,
)


class Treatment(enum.Enum):
    """Distribution of the simulated treatment."""
    normal = 'normal'
    binary = 'binary'


def _readonly(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SimulationDesign:
    """Data-generating setup for the marginal model M = Za + E1,
    R = Zc + Mb + E2 with rows of E1 ~ N(0, sigma1)."""

    n: int
    k: int
    a_true: np.ndarray
    b_true: np.ndarray
    sigma1: np.ndarray
    c_true: float = 1.0
    sigma2: float = 1.0
    seed: int = 0
    treatment: Treatment = Treatment.normal
    rho_m: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'n', validate_positive_integer(self.n, 'n'))
        object.__setattr__(self, 'k', validate_positive_integer(self.k, 'k'))
        if self.n < 3:
            raise ValueError('n must be at least 3')
        a = validate_finite(self.a_true, 'a_true', ndim=1)
        b = validate_finite(self.b_true, 'b_true', ndim=1)
        if a.shape[0] != self.k or b.shape[0] != self.k:
            raise ValueError(f'a_true and b_true must have length k={self.k}')
        if not np.any(a * b != 0):
            raise ValueError('design needs at least one nonzero pathway')
        sigma1 = validate_finite(self.sigma1, 'sigma1', ndim=2)
        if sigma1.shape != (self.k, self.k):
            raise ValueError(f'sigma1 must be {self.k}x{self.k}')
        if not np.array_equal(sigma1, sigma1.T):
            raise ValueError('sigma1 must be symmetric')
        if np.linalg.eigvalsh(sigma1).min() <= 0:
            raise ValueError('sigma1 must be positive definite')
        object.__setattr__(self, 'a_true', _readonly(a))
        object.__setattr__(self, 'b_true', _readonly(b))
        object.__setattr__(self, 'sigma1', _readonly(sigma1))
        object.__setattr__(self, 'c_true', validate_numeric_range(self.c_true, 'c_true'))
        object.__setattr__(self, 'sigma2', validate_numeric_range(self.sigma2, 'sigma2', min_val=0.0, min_inclusive=False))
        object.__setattr__(self, 'treatment', Treatment(self.treatment))

    @property
    def ab_true(self):
        return self.a_true * self.b_true

    @property
    def true_set(self):
        return frozenset(int(j) + 1 for j in np.flatnonzero(self.ab_true != 0))

    def to_dict(self):
        return {
            'n': self.n,
            'k': self.k,
            'a_true': self.a_true.tolist(),
            'b_true': self.b_true.tolist(),
            'c_true': self.c_true,
            'sigma2': self.sigma2,
            'rho_m': self.rho_m,
            'seed': self.seed,
            'treatment': self.treatment.value,
        }


@dataclass(frozen=True, eq=False)
class FullModelDesign:
    """Sequential mediator model: M_j = Z a_j + sum_{l<j} M_l delta_lj + eps_j,
    with eps_j ~ N(0, xi_j) (xi holds variances)."""

    n: int
    k: int
    a_small: np.ndarray
    b_true: np.ndarray
    delta: np.ndarray
    xi: np.ndarray
    c_true: float = 1.0
    sigma2: float = 1.0
    seed: int = 0
    treatment: Treatment = Treatment.normal

    def __post_init__(self):
        object.__setattr__(self, 'n', validate_positive_integer(self.n, 'n'))
        object.__setattr__(self, 'k', validate_positive_integer(self.k, 'k'))
        a = validate_finite(self.a_small, 'a_small', ndim=1)
        b = validate_finite(self.b_true, 'b_true', ndim=1)
        delta = validate_finite(self.delta, 'delta', ndim=2)
        xi = validate_finite(self.xi, 'xi', ndim=1)
        if a.shape[0] != self.k or b.shape[0] != self.k or xi.shape[0] != self.k:
            raise ValueError(f'a_small, b_true and xi must have length k={self.k}')
        if delta.shape != (self.k, self.k):
            raise ValueError(f'delta must be {self.k}x{self.k}')
        if np.any(np.tril(delta) != 0):
            raise ValueError('delta must be strictly upper triangular')
        if np.any(xi <= 0):
            raise ValueError('xi entries must be positive')
        object.__setattr__(self, 'a_small', _readonly(a))
        object.__setattr__(self, 'b_true', _readonly(b))
        object.__setattr__(self, 'delta', _readonly(delta))
        object.__setattr__(self, 'xi', _readonly(xi))
        object.__setattr__(self, 'sigma2', validate_numeric_range(self.sigma2, 'sigma2', min_val=0.0, min_inclusive=False))
        object.__setattr__(self, 'treatment', Treatment(self.treatment))

    def to_dict(self):
        return {
            'n': self.n,
            'k': self.k,
            'a_small': self.a_small.tolist(),
            'b_true': self.b_true.tolist(),
            'delta': self.delta.tolist(),
            'xi': self.xi.tolist(),
            'c_true': self.c_true,
            'sigma2': self.sigma2,
            'seed': self.seed,
            'treatment': self.treatment.value,
        }


@dataclass(frozen=True, eq=False)
class TruthRecord:
    """Generating coefficients of a simulated dataset.

    a_true is the marginal effect of Z on each mediator; under the sequential
    model it is the induced a(I - delta)^-1 and a_small/delta are kept too.
    """

    a_true: np.ndarray
    b_true: np.ndarray
    c_true: float
    seed: int = 0
    sigma1_spec: dict = field(default_factory=dict)
    a_small: Optional[np.ndarray] = None
    delta: Optional[np.ndarray] = None

    @property
    def ab_true(self):
        return np.asarray(self.a_true) * np.asarray(self.b_true)

    @property
    def true_set(self) -> FrozenSet[int]:
        return frozenset(int(j) + 1 for j in np.flatnonzero(self.ab_true != 0))

    @classmethod
    def from_dict(cls, data):
        return cls(
            a_true=np.asarray(data['a_true'], dtype=float),
            b_true=np.asarray(data['b_true'], dtype=float),
            c_true=float(data['c_true']),
            seed=int(data.get('seed', 0)),
            sigma1_spec=dict(data.get('sigma1_spec') or {}),
            a_small=None if data.get('a_small') is None else np.asarray(data['a_small'], dtype=float),
            delta=None if data.get('delta') is None else np.asarray(data['delta'], dtype=float),
        )

    def to_dict(self):
        """Convert truth to the truth JSON layout."""
        data = {
            'a_true': np.asarray(self.a_true).tolist(),
            'b_true': np.asarray(self.b_true).tolist(),
            'c_true': self.c_true,
            'ab_true': self.ab_true.tolist(),
            'true_set': sorted(self.true_set),
            'sigma1_spec': self.sigma1_spec,
            'seed': self.seed,
        }
        if self.a_small is not None:
            data['a_small'] = np.asarray(self.a_small).tolist()
        if self.delta is not None:
            data['delta'] = np.asarray(self.delta).tolist()
        return data
