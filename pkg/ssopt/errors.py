from dataclasses import dataclass
from typing import Any, List, Optional


class SSOptError(Exception):
    """Base class for all ssopt errors."""


@dataclass(frozen=True)
class Violation:
    tag: str
    value: Any
    message: str

    def to_dict(self):
        value = self.value
        if isinstance(value, float) and value != value:
            value = 'nan'
        elif not isinstance(value, (int, float, str, bool, type(None), list)):
            value = repr(value)
        return {'tag': self.tag, 'value': value, 'message': self.message}

    def __str__(self):
        return '[{}] {} (value={!r})'.format(self.tag, self.message, self.value)


class ValidationError(SSOptError, ValueError):
    """All violated conditions of a problem description, collected in one pass."""

    def __init__(self, violations: List[Violation], grid: Optional[dict] = None):
        self.violations = list(violations)
        self.grid = grid
        super().__init__('; '.join(str(v) for v in self.violations))

    @property
    def tags(self):
        return [v.tag for v in self.violations]

    def to_dict(self):
        out = {'violations': [v.to_dict() for v in self.violations]}
        if self.grid is not None:
            out['grid'] = self.grid
        return out


class KinkError(SSOptError, ValueError):
    pass


class QuadratureError(SSOptError, RuntimeError):
    pass


class RootFindError(SSOptError, RuntimeError):
    pass


class PolicyError(SSOptError, ValueError):
    pass


class InternalError(SSOptError, RuntimeError):
    pass
