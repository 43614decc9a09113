from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from pathlasso.utils.validators import validate_finite


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MediationDataset:
    """Treatment z, mediator matrix m (n x K) and outcome r."""

    z: np.ndarray
    m: np.ndarray
    r: np.ndarray
    column_names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        z = validate_finite(self.z, 'z', ndim=1)
        m = validate_finite(self.m, 'm')
        if m.ndim == 1:
            m = m.reshape(-1, 1)
        if m.ndim != 2:
            raise ValueError(f'm must be a matrix, got shape {m.shape}')
        r = validate_finite(self.r, 'r', ndim=1)

        n = z.shape[0]
        if n < 3:
            raise ValueError(f'at least 3 observations are required, got {n}')
        if m.shape[0] != n or r.shape[0] != n:
            raise ValueError(f'dimension mismatch: z has {n} rows, m has {m.shape[0]}, r has {r.shape[0]}')
        if m.shape[1] < 1:
            raise ValueError('at least one mediator is required')
        if np.var(z) == 0:
            raise ValueError("constant column 'Z': treatment must vary")

        names = self.column_names
        if names is None:
            names = tuple(f'M{j + 1}' for j in range(m.shape[1]))
        names = tuple(str(name) for name in names)
        if len(names) != m.shape[1]:
            raise ValueError(f'{len(names)} column names given for {m.shape[1]} mediators')

        object.__setattr__(self, 'z', _frozen(z))
        object.__setattr__(self, 'm', _frozen(m))
        object.__setattr__(self, 'r', _frozen(r))
        object.__setattr__(self, 'column_names', names)

    @property
    def n(self):
        return self.z.shape[0]

    @property
    def k(self):
        return self.m.shape[1]

    def subset(self, rows):
        """Dataset restricted to the given row indices (in the given order)."""
        rows = np.asarray(rows)
        return MediationDataset(self.z[rows], self.m[rows], self.r[rows], self.column_names)

    def __repr__(self):
        return f'<MediationDataset n={self.n} K={self.k}>'

    def to_dict(self):
        """Convert dataset to dictionary."""
        return {
            'n': self.n,
            'k': self.k,
            'column_names': list(self.column_names),
        }


@dataclass(frozen=True, eq=False)
class StandardizedDataset:
    """A dataset whose columns have mean 0 and sample sd 1, with the
    centers and scales needed to return to the raw scale.

    Column order for centers/scales is (Z, M1..MK, R).
    """

    dataset: MediationDataset
    centers: np.ndarray
    scales: np.ndarray
    standardized: bool = field(default=True)

    def __post_init__(self):
        expected = self.dataset.k + 2
        centers = validate_finite(self.centers, 'centers', ndim=1)
        scales = validate_finite(self.scales, 'scales', ndim=1)
        if centers.shape[0] != expected or scales.shape[0] != expected:
            raise ValueError(f'centers and scales must have length {expected}')
        if np.any(scales <= 0):
            raise ValueError('scales must be positive')
        object.__setattr__(self, 'centers', _frozen(centers))
        object.__setattr__(self, 'scales', _frozen(scales))

    @property
    def z(self):
        return self.dataset.z

    @property
    def m(self):
        return self.dataset.m

    @property
    def r(self):
        return self.dataset.r

    @property
    def n(self):
        return self.dataset.n

    @property
    def k(self):
        return self.dataset.k

    @property
    def column_names(self):
        return self.dataset.column_names

    def subset(self, rows):
        """Rows of the standardized data; centers and scales are inherited,
        the subset itself is not re-standardized."""
        return StandardizedDataset(self.dataset.subset(rows), self.centers, self.scales)

    def __repr__(self):
        return f'<StandardizedDataset n={self.n} K={self.k}>'

    def to_dict(self):
        """Convert dataset to dictionary."""
        return {
            **self.dataset.to_dict(),
            'standardized': self.standardized,
            'centers': self.centers.tolist(),
            'scales': self.scales.tolist(),
        }


@dataclass(frozen=True, eq=False)
class AugmentedDesign:
    """Stacked design X = (Z M) with the masks used by the solver.

    j_mask is (0, 1, ..., 1), phi_mask is (0, phi, ..., phi) and omega1 is
    the diagonal of diag{0, W1}.
    """

    x: np.ndarray
    e1: np.ndarray
    j_mask: np.ndarray
    phi_mask: np.ndarray
    omega1: np.ndarray

    def __repr__(self):
        return f'<AugmentedDesign shape={self.x.shape}>'
