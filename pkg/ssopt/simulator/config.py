from dataclasses import asdict, dataclass

from .. import params


@dataclass(frozen=True)
class PathConfig:
    horizon: float
    dt: float
    seed: int = 0
    replications: int = 1
    burn_in: float = params.burn_in
    block_size: int = params.block_size

    def __post_init__(self):
        if not (self.horizon > 0 and self.dt > 0):
            raise ValueError('horizon and dt must be positive, got T={} dt={}'.format(self.horizon, self.dt))
        if self.dt > self.horizon / 1e4:
            raise ValueError('dt={} is too coarse for horizon {}: need dt <= T/1e4'.format(self.dt, self.horizon))
        if self.replications < 1:
            raise ValueError('replications must be >= 1, got {}'.format(self.replications))
        if not (0 <= self.burn_in < 0.5):
            raise ValueError('burn_in must lie in [0, 0.5), got {}'.format(self.burn_in))
        if self.block_size < 1:
            raise ValueError('block_size must be >= 1, got {}'.format(self.block_size))
        if self.seed < 0:
            raise ValueError('seed must be nonnegative, got {}'.format(self.seed))

    @property
    def n_steps(self):
        return int(round(self.horizon / self.dt))

    @property
    def n_burn(self):
        """Steps 1..n_burn are discarded from the averages."""
        return int(round(self.burn_in * self.n_steps))

    @property
    def measured_time(self):
        return (self.n_steps - self.n_burn) * self.dt

    def to_dict(self):
        return asdict(self)
