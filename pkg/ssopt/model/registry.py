import fnmatch
import sys
from collections import defaultdict

from ..utils import natural_key

__all__ = ['register_holding', 'register_setup', 'list_kinds', 'is_kind', 'kind_entrypoint']

_family_to_kinds = defaultdict(set)  # family ('holding' / 'setup') -> kind names
_kind_entrypoints = {}  # (family, kind name) -> entrypoint fn


def _register(family, fn):
    mod = sys.modules[fn.__module__]

    # add kind to __all__ in module
    kind_name = fn.__name__
    if hasattr(mod, '__all__'):
        mod.__all__.append(kind_name)
    else:
        mod.__all__ = [kind_name]

    _kind_entrypoints[(family, kind_name)] = fn
    _family_to_kinds[family].add(kind_name)
    return fn


def register_holding(fn):
    return _register('holding', fn)


def register_setup(fn):
    return _register('setup', fn)


def list_kinds(family, filter=''):
    """ Return list of registered kind names of a family, sorted naturally

    Args:
        family (str) - 'holding' or 'setup'
        filter (str) - Wildcard filter string that works with fnmatch
    """
    kinds = _family_to_kinds[family]
    if filter:
        kinds = fnmatch.filter(kinds, filter)
    return list(sorted(kinds, key=natural_key))


def is_kind(family, kind_name):
    """ Check if a kind name exists in a family
    """
    return (family, kind_name) in _kind_entrypoints


def kind_entrypoint(family, kind_name):
    """Fetch the entrypoint for a kind name
    """
    return _kind_entrypoints[(family, kind_name)]
