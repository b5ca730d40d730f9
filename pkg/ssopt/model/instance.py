import json
import logging
import math
from dataclasses import dataclass
from typing import Optional

from .. import params
from ..errors import ValidationError, Violation
from .demand import BrownianDemand
from .factory import _number, create_holding, create_setup
from .holding import HoldingCostModel
from .setup_cost import OrderingCostModel

logger = logging.getLogger(__name__)

_TOP_FIELDS = {'demand', 'holding', 'ordering', 'x0'}
_DEMAND_FIELDS = {'mu', 'sigma2'}
_ORDERING_FIELDS = {'k', 'setup'}


@dataclass(frozen=True)
class ProblemInstance:
    demand: BrownianDemand
    holding: HoldingCostModel
    ordering: OrderingCostModel
    x0: float = 0.0
    validation_grid: Optional[dict] = None

    @property
    def setup(self):
        return self.ordering.setup

    @property
    def k(self):
        return self.ordering.k

    def to_dict(self):
        return {
            'demand': self.demand.to_dict(),
            'holding': self.holding.to_dict(),
            'ordering': self.ordering.to_dict(),
            'x0': self.x0,
        }


def _fields(raw, allowed, required, where):
    if not isinstance(raw, dict):
        return [Violation('SCHEMA', raw, '{} must be an object'.format(where))]
    violations = [Violation('SCHEMA', k, 'unknown field {!r} in {}'.format(k, where))
                  for k in sorted(set(raw) - allowed)]
    violations += [Violation('SCHEMA', k, 'missing field {!r} in {}'.format(k, where))
                   for k in sorted(required - set(raw))]
    return violations


def _kind_and_params(raw, where):
    if not isinstance(raw, dict):
        raise ValidationError([Violation('SCHEMA', raw, '{} must be an object'.format(where))])
    if 'kind' not in raw:
        raise ValidationError([Violation('SCHEMA', 'kind', 'missing field {!r} in {}'.format('kind', where))])
    fields = dict(raw)
    return fields.pop('kind'), fields


def validate(raw) -> ProblemInstance:
    """Validate a raw problem description (parsed JSON) into a ProblemInstance.

    Every violated condition is collected before raising ValidationError, each tagged
    S1..S4, H1..H5, D1, D2, C1 or SCHEMA.
    """
    violations = _fields(raw, _TOP_FIELDS, _TOP_FIELDS - {'x0'}, 'problem')
    if violations and not isinstance(raw, dict):
        raise ValidationError(violations)

    demand = holding = ordering = None
    x0 = 0.0
    grid = None

    def collect(fn):
        try:
            return fn()
        except ValidationError as e:
            violations.extend(e.violations)
            return None

    raw_demand = raw.get('demand')
    demand_violations = _fields(raw_demand, _DEMAND_FIELDS, _DEMAND_FIELDS, 'demand') if 'demand' in raw else None
    violations.extend(demand_violations or [])
    if demand_violations == []:
        demand = collect(lambda: BrownianDemand(_number(raw_demand['mu'], 'demand.mu'),
                                                _number(raw_demand['sigma2'], 'demand.sigma2')))
        if demand is not None:
            violations.extend(demand.check())

    if 'holding' in raw:
        def build_holding():
            kind, fields = _kind_and_params(raw['holding'], 'holding')
            return create_holding(kind, **fields)
        holding = collect(build_holding)
        if holding is not None:
            if holding.sampled:
                grid = {'lo': -params.h_grid_scale, 'hi': params.h_grid_scale, 'points': params.h_grid_points}
            violations.extend(holding.check())

    raw_ordering = raw.get('ordering')
    ordering_violations = _fields(raw_ordering, _ORDERING_FIELDS, _ORDERING_FIELDS, 'ordering') if 'ordering' in raw else None
    violations.extend(ordering_violations or [])
    if ordering_violations == []:
        def build_ordering():
            kind, fields = _kind_and_params(raw_ordering['setup'], 'ordering.setup')
            return OrderingCostModel(_number(raw_ordering['k'], 'ordering.k'), create_setup(kind, **fields))
        ordering = collect(build_ordering)
        if ordering is not None:
            violations.extend(ordering.check())

    if 'x0' in raw:
        x0 = collect(lambda: _number(raw['x0'], 'x0'))
        if x0 is not None and not math.isfinite(x0):
            violations.append(Violation('SCHEMA', x0, 'x0 must be finite'))

    if violations:
        raise ValidationError(violations, grid=grid)
    logger.debug('Validated instance: {}'.format(raw))
    return ProblemInstance(demand, holding, ordering, x0, validation_grid=grid)


def load_instance(filename) -> ProblemInstance:
    """Parse and validate a JSON problem document; json.JSONDecodeError keeps its line/column."""
    with open(filename) as f:
        raw = json.load(f)
    return validate(raw)


def instance_to_dict(instance: ProblemInstance):
    return instance.to_dict()
