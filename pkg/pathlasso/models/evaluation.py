from dataclasses import dataclass
from typing import FrozenSet, Optional, Tuple

import numpy as np

from pathlasso.models.penalty import PenaltySpec


@dataclass(frozen=True)
class SelectionResult:
    """Selected mediators (1-based indices)."""

    selected: FrozenSet[int]
    cutoff: float
    source: str = 'PathLasso'

    def __len__(self):
        return len(self.selected)

    def to_dict(self):
        return {
            'selected': sorted(self.selected),
            'cutoff': self.cutoff,
            'source': self.source,
        }


@dataclass(frozen=True, eq=False)
class RocCurve:
    """ROC points sorted by false-positive rate, anchored at (0,0) and (1,1)."""

    fpr: np.ndarray
    tpr: np.ndarray
    auc: float

    @property
    def points(self):
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))

    def to_dict(self):
        return {'fpr': self.fpr.tolist(), 'tpr': self.tpr.tolist(), 'auc': self.auc}


@dataclass(frozen=True, eq=False)
class CvReport:
    """Held-out losses per grid spec; chosen minimizes the mean."""

    grid: Tuple[PenaltySpec, ...]
    mean_loss: np.ndarray
    fold_losses: np.ndarray
    chosen: int
    folds: int
    seed: int
    fold_sizes: Tuple[int, ...] = ()
    fold_converged: Optional[np.ndarray] = None

    @property
    def chosen_spec(self):
        return self.grid[self.chosen]

    @property
    def unconverged(self):
        """(fold, lambda, omega) of every fold fit that stopped at max_iter."""
        if self.fold_converged is None:
            return []
        return [{'fold': int(f) + 1, 'lambda': self.grid[i].lam, 'omega': self.grid[i].omega}
                for i, f in np.argwhere(~self.fold_converged)]

    def to_dict(self):
        """Convert report to dictionary."""
        return {
            'folds': self.folds,
            'seed': self.seed,
            'fold_sizes': list(self.fold_sizes),
            'chosen': self.chosen,
            'chosen_spec': self.chosen_spec.to_dict(),
            'grid': [
                {
                    **spec.to_dict(),
                    'mean_loss': float(self.mean_loss[i]),
                    'fold_losses': self.fold_losses[i].tolist(),
                    **({} if self.fold_converged is None
                       else {'fold_converged': self.fold_converged[i].tolist()}),
                    'chosen': i == self.chosen,
                }
                for i, spec in enumerate(self.grid)
            ],
        }
