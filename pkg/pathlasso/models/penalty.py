from dataclasses import dataclass
from typing import Optional, Tuple
import enum

import numpy as np

from pathlasso.utils.validators import validate_numeric_range


class OmegaRule(enum.Enum):
    """How the l1 strength follows lambda along a path."""
    zero = 'zero'
    tenth = '0.1lambda'
    equal = 'lambda'
    fixed = 'fixed'

    def omega_for(self, lam, omega=0.0):
        if self is OmegaRule.zero:
            return 0.0
        if self is OmegaRule.tenth:
            return 0.1 * lam
        if self is OmegaRule.equal:
            return lam
        return omega


@dataclass(frozen=True)
class PenaltySpec:
    """Tuning parameters and loss weights of the penalized criterion.

    w1 holds the diagonal of W1; None means the identity.
    """

    lam: float
    phi: float = 2.0
    omega: float = 0.0
    w1: Optional[Tuple[float, ...]] = None
    w2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'lam', validate_numeric_range(self.lam, 'lambda', min_val=0.0))
        object.__setattr__(self, 'phi', validate_numeric_range(self.phi, 'phi', min_val=0.5))
        object.__setattr__(self, 'omega', validate_numeric_range(self.omega, 'omega', min_val=0.0))
        object.__setattr__(self, 'w2', validate_numeric_range(self.w2, 'w2', min_val=0.0, min_inclusive=False))
        if self.w1 is not None:
            weights = tuple(validate_numeric_range(w, 'w1', min_val=0.0, min_inclusive=False)
                            for w in np.atleast_1d(self.w1))
            object.__setattr__(self, 'w1', weights)

    def weights(self, k):
        """Diagonal of W1 as an array of length k."""
        if self.w1 is None:
            return np.ones(k)
        if len(self.w1) != k:
            raise ValueError(f'w1 has {len(self.w1)} entries for {k} mediators')
        return np.asarray(self.w1, dtype=float)

    def with_tuning(self, lam=None, omega=None):
        return PenaltySpec(
            lam=self.lam if lam is None else lam,
            phi=self.phi,
            omega=self.omega if omega is None else omega,
            w1=self.w1,
            w2=self.w2,
        )

    def to_dict(self):
        """Convert spec to dictionary."""
        return {
            'lambda': self.lam,
            'phi': self.phi,
            'omega': self.omega,
            'w1': list(self.w1) if self.w1 is not None else None,
            'w2': self.w2,
        }
