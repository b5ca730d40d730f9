import json
import math

import pytest

from ssopt.analytics import Analytics
from ssopt.model import validate

LN2 = math.log(2.0)


def make_instance(holding, setup, k=0.0, mu=1.0, sigma2=2.0, x0=0.0):
    return validate({
        'demand': {'mu': mu, 'sigma2': sigma2},
        'holding': holding,
        'ordering': {'k': k, 'setup': setup},
        'x0': x0,
    })


ABS = {'kind': 'piecewise_linear', 'beta1': 1.0, 'beta2': 1.0}
SQUARE = {'kind': 'quadratic', 'beta': 1.0}


def constant(kappa):
    return {'kind': 'constant', 'kappa': kappa}


def step(breakpoints, values):
    return {'kind': 'step', 'breakpoints': breakpoints, 'values': values}


@pytest.fixture
def instance_a():
    """mu=1, sigma2=2, h=|z|, K=1"""
    return make_instance(ABS, constant(1.0))


@pytest.fixture
def instance_b():
    """mu=1, sigma2=2, h=z^2, K=36"""
    return make_instance(SQUARE, constant(36.0))


@pytest.fixture
def instance_b_free():
    return make_instance(SQUARE, constant(0.0))


@pytest.fixture
def analytics_a(instance_a):
    return Analytics(instance_a)


@pytest.fixture
def analytics_b(instance_b):
    return Analytics(instance_b)


@pytest.fixture
def step_b():
    return make_instance(SQUARE, step([4.0], [6.0, 48.0]))


@pytest.fixture
def step_b_cheap_large():
    return make_instance(SQUARE, step([4.0], [6.0, 0.6]))


@pytest.fixture
def write_instance(tmp_path):
    def _write(raw, name='instance.json'):
        path = tmp_path / name
        path.write_text(json.dumps(raw))
        return str(path)
    return _write


def raw_instance(holding=SQUARE, setup=None, k=0.0, mu=1.0, sigma2=2.0):
    return {
        'demand': {'mu': mu, 'sigma2': sigma2},
        'holding': holding,
        'ordering': {'k': k, 'setup': setup or constant(36.0)},
    }
