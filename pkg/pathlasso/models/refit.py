from dataclasses import dataclass
from typing import Tuple


@dataclass(frozen=True)
class RefitPathway:
    """Refit estimate and percentile interval for one selected pathway."""

    mediator: int
    label: str
    ab_refit: float
    ci_low: float
    ci_high: float
    proportion_mediated: float

    @property
    def significant(self):
        return not (self.ci_low <= 0.0 <= self.ci_high)

    @property
    def covers_estimate(self):
        return self.ci_low <= self.ab_refit <= self.ci_high

    def to_dict(self):
        return {
            'pathway': self.label,
            'ab_refit': self.ab_refit,
            'ci_low': self.ci_low,
            'ci_high': self.ci_high,
            'significant': self.significant,
            'proportion_mediated': self.proportion_mediated,
            'covers_estimate': self.covers_estimate,
        }


@dataclass(frozen=True)
class RefitReport:
    """Post-selection refit with bootstrap intervals."""

    pathways: Tuple[RefitPathway, ...]
    total_effect: float
    resamples: int
    level: float
    degenerate_resamples: int = 0
    seed: int = 0

    def to_dict(self):
        return {
            'total_effect': self.total_effect,
            'resamples': self.resamples,
            'level': self.level,
            'degenerate_resamples': self.degenerate_resamples,
            'seed': self.seed,
            'pathways': [p.to_dict() for p in self.pathways],
        }
