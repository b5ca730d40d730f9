import math
from dataclasses import dataclass, field

from ..errors import Violation


@dataclass(frozen=True)
class BrownianDemand:
    """Net demand D(t) = mu*t - sigma*B(t); inventory before ordering is X(t) = x - D(t).

    ``lam`` is derived as 2*mu/sigma2 and never read from input.
    """
    mu: float
    sigma2: float
    lam: float = field(init=False)

    def __post_init__(self):
        lam = 2.0 * self.mu / self.sigma2 if self.sigma2 else math.nan
        object.__setattr__(self, 'lam', lam)

    @property
    def sigma(self):
        return math.sqrt(self.sigma2)

    def check(self):
        violations = []
        if not (math.isfinite(self.mu) and self.mu > 0):
            violations.append(Violation('D1', self.mu, 'drift mu must be finite and > 0'))
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            violations.append(Violation('D2', self.sigma2, 'variance rate sigma2 must be finite and > 0'))
        return violations

    def to_dict(self):
        return {'mu': self.mu, 'sigma2': self.sigma2}
