from dataclasses import dataclass
import math


@dataclass(frozen=True)
class ProxParams:
    """Parameters of the pairwise problem

        minimize  lam*|ab| + omega*(|a| + |b|) + phi1*a^2/2 + phi2*b^2/2 - mu1*a - mu2*b
    """

    lam: float
    omega: float
    phi1: float
    phi2: float
    mu1: float
    mu2: float

    def __post_init__(self):
        for name in ('lam', 'omega', 'phi1', 'phi2', 'mu1', 'mu2'):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f'{name} must be finite')
            object.__setattr__(self, name, value)
        if self.lam < 0 or self.omega < 0:
            raise ValueError('lam and omega must be non-negative')
        if self.phi1 <= 0 or self.phi2 <= 0:
            raise ValueError('phi1 and phi2 must be positive')

    @property
    def convex(self):
        return min(self.phi1, self.phi2) > self.lam

    def swapped(self):
        return ProxParams(self.lam, self.omega, self.phi2, self.phi1, self.mu2, self.mu1)

    def to_dict(self):
        return {
            'lambda': self.lam,
            'omega': self.omega,
            'phi1': self.phi1,
            'phi2': self.phi2,
            'mu1': self.mu1,
            'mu2': self.mu2,
        }


@dataclass(frozen=True)
class ProxSolution:
    """Minimizer (a, b) and the branch that produced it.

    condition_id is 1..7 for the closed-form branches, 0 for plain
    soft-thresholding (lam = 0) and -1 for candidate enumeration.
    """

    a: float
    b: float
    condition_id: int

    def to_dict(self):
        return {'a': self.a, 'b': self.b, 'condition': self.condition_id}
