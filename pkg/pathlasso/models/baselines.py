from dataclasses import dataclass


@dataclass(frozen=True)
class BkPathwayResult:
    """Single-mediator Baron-Kenny fit with its Sobel test."""

    mediator: int
    label: str
    a_hat: float
    se_a: float
    b_hat: float
    se_b: float
    c_hat: float
    z_stat: float
    p_value: float
    selected: bool = False
    degenerate: bool = False

    @property
    def ab_hat(self):
        return self.a_hat * self.b_hat

    def __repr__(self):
        return f'<BkPathwayResult {self.label} ab={self.ab_hat:.4g} p={self.p_value:.3g}>'

    def to_dict(self):
        """Convert result to dictionary (BK CSV column order)."""
        return {
            'mediator': self.mediator,
            'a': self.a_hat,
            'se_a': self.se_a,
            'b': self.b_hat,
            'se_b': self.se_b,
            'ab': self.ab_hat,
            'z': self.z_stat,
            'p': self.p_value,
            'selected': self.selected,
            'label': self.label,
            'c': self.c_hat,
            'degenerate': self.degenerate,
        }
