from dataclasses import asdict, dataclass, field

from .. import params


@dataclass(frozen=True)
class QuadratureConfig:
    scheme: str = 'auto'  # 'auto' uses closed forms where available, 'simpson' forces quadrature
    tol: float = params.quad_tol
    max_depth: int = params.simpson_max_depth

    def __post_init__(self):
        if self.scheme not in ('auto', 'simpson'):
            raise ValueError('Unknown quadrature scheme ({})'.format(self.scheme))
        if not (0 < self.tol <= params.max_tol):
            raise ValueError('quadrature tol must lie in (0, {}], got {}'.format(params.max_tol, self.tol))


@dataclass(frozen=True)
class RootFindConfig:
    expansion: float = params.bracket_factor
    tol: float = params.root_tol
    max_iter: int = params.root_max_iter
    cap: float = params.bracket_cap

    def __post_init__(self):
        if not (0 < self.tol <= params.max_tol):
            raise ValueError('root tol must lie in (0, {}], got {}'.format(params.max_tol, self.tol))
        if self.expansion <= 1:
            raise ValueError('bracket expansion factor must exceed 1, got {}'.format(self.expansion))


@dataclass(frozen=True)
class AnalyticsContext:
    instance: object
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    rootfind: RootFindConfig = field(default_factory=RootFindConfig)

    def to_dict(self):
        return {'quadrature': asdict(self.quadrature), 'rootfind': asdict(self.rootfind)}
