from dataclasses import dataclass

import numpy as np

from pathlasso.utils.validators import validate_finite


@dataclass(frozen=True, eq=False)
class PathwayCoefficients:
    """Model coefficients: a (Z -> Mj), b (Mj -> R) and the direct effect c."""

    a: np.ndarray
    b: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        a = validate_finite(np.atleast_1d(self.a), 'a', ndim=1)
        b = validate_finite(np.atleast_1d(self.b), 'b', ndim=1)
        if a.shape != b.shape:
            raise ValueError(f'a and b must have equal length, got {a.shape[0]} and {b.shape[0]}')
        c = float(self.c)
        if not np.isfinite(c):
            raise ValueError('c must be finite')
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)
        object.__setattr__(self, 'c', c)

    @classmethod
    def zeros(cls, k):
        return cls(np.zeros(k), np.zeros(k), 0.0)

    @property
    def k(self):
        return self.a.shape[0]

    @property
    def ab(self):
        """Per-pathway effects a_j * b_j."""
        return self.a * self.b

    def __repr__(self):
        return f'<PathwayCoefficients K={self.k} c={self.c:.4g}>'

    def to_dict(self):
        """Convert coefficients to dictionary."""
        return {
            'a': self.a.tolist(),
            'b': self.b.tolist(),
            'c': self.c,
            'ab': self.ab.tolist(),
        }
