import inspect
import math

from ..errors import ValidationError, Violation
from .holding import PolyBoundWitness
from .registry import is_kind, kind_entrypoint, list_kinds


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError([Violation('SCHEMA', value, '{} must be a number'.format(where))])
    return float(value)


def _numbers(value, where):
    if not isinstance(value, (list, tuple)):
        raise ValidationError([Violation('SCHEMA', value, '{} must be a list of numbers'.format(where))])
    return [_number(v, '{}[{}]'.format(where, i)) for i, v in enumerate(value)]


def _create(family, kind, params):
    if not is_kind(family, kind):
        raise ValidationError([Violation(
            'SCHEMA', kind, 'unknown {} kind {!r}; known: {}'.format(family, kind, ', '.join(list_kinds(family))))])
    create_fn = kind_entrypoint(family, kind)
    sig = inspect.signature(create_fn)
    unknown = sorted(set(params) - set(sig.parameters))
    missing = sorted(name for name, p in sig.parameters.items()
                     if p.default is inspect.Parameter.empty and name not in params)
    violations = [Violation('SCHEMA', name, 'unknown field {!r} for {} kind {!r}'.format(name, family, kind))
                  for name in unknown]
    violations += [Violation('SCHEMA', name, 'missing field {!r} for {} kind {!r}'.format(name, family, kind))
                   for name in missing]
    if violations:
        raise ValidationError(violations)
    margs = {}
    for name, value in params.items():
        where = '{}.{}'.format(family, name)
        if name == 'witness':
            margs[name] = parse_witness(value)
        elif isinstance(value, (list, tuple)):
            margs[name] = _numbers(value, where)
        else:
            margs[name] = _number(value, where)
    return create_fn(**margs)


def parse_witness(raw):
    if raw is None or isinstance(raw, PolyBoundWitness):
        return raw
    if not isinstance(raw, dict) or set(raw) != {'a', 'b0', 'b1'}:
        raise ValidationError([Violation('SCHEMA', raw, 'witness must be an object with exactly a, b0, b1')])
    a = _number(raw['a'], 'witness.a')
    a = int(a) if math.isfinite(a) and a == int(a) else a
    return PolyBoundWitness(a, _number(raw['b0'], 'witness.b0'), _number(raw['b1'], 'witness.b1'))


def create_holding(kind, **params):
    """Create a holding cost model by kind name

    Args:
        kind (str): registered holding kind ('piecewise_linear', 'quadratic', 'convex_poly')

    Keyword Args:
        kind specific parameters, plus an optional ``witness`` {a, b0, b1} for (H5)
    """
    return _create('holding', kind, params)


def create_setup(kind, **params):
    """Create a setup cost model by kind name ('constant', 'step', 'contract_fee', 'free_shipping')."""
    return _create('setup', kind, params)
