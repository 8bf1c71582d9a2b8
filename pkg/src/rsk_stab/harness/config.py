### SPDX-License-Identifier: GPL-2.0-or-later

"""Experiment configuration.

A configuration is one JSON object. Each section is a modelled dict, so unknown
keys are rejected and every default is materialised into the echoed config.
The top level is :class:`ExperimentConfig`:

* 'seed': the master seed, an integer in [0, 2^64 - 1]

* 'threads': the worker cap, or None for the library default

* 'data': :class:`DataConfig`, a synthetic source or a CSV file

* 'recipe': a learner or ensemble recipe (see :mod:`rsk_stab.ensembles.recipes`)

* 'loss': :class:`LossConfig`

* 'stability': :class:`StabilityConfig`

* 'bounds': :class:`BoundsConfig`

* 'equivalence': :class:`EquivalenceConfig`

* 'experiment': :class:`RunConfig`
"""

import json

from rsk_stab.enforce.value import (
    ValueType,
    Boolean,
    Integer,
    Real,
    String,
    Enum,
    SequenceOf,
    Constrained,
    Choice,
    optional,
)
from rsk_stab.enforce.constraint import (
    Interval,
    at_least,
    positive,
    unit_interval,
)
from rsk_stab.model import ModelledDict
from rsk_stab.core.data import TASK
from rsk_stab.core.losses import KIND
from rsk_stab.core.seed import MASTER_MAX
from rsk_stab.learners.learner import LEARNER_SPEC
from rsk_stab.ensembles.recipes import RECIPE
from rsk_stab.stability.empirical import POLICY
from rsk_stab.stability.bounds import (
    BAG_Q_MODE,
    DAG_Q_MODE,
    OCCUPANCY,
)

COUNT = Constrained(Integer(), (at_least(1),))
SIZE = Constrained(Integer(), (at_least(2),))
NONNEGATIVE = Constrained(Real(), (at_least(0),))
POSITIVE = Constrained(Real(), (positive(),))

class DataConfig(metaclass=ModelledDict):
    """The dataset: a synthetic 'source' or a CSV file at 'path'.

    A synthetic training set has 'm' examples and a fresh holdout set of
    'holdout' examples. A CSV dataset is split, holding out 'holdout_fraction'
    of it; its 'task' defaults to 'binary'.
    """
    model = {
        'source': {'value_type': Enum(('blobs', 'linear', 'csv')), 'default': 'blobs'},
        'm': {'value_type': SIZE, 'default': 50},
        'd': {'value_type': COUNT, 'default': 2},
        'separation': {'value_type': NONNEGATIVE, 'default': 2.0},
        'noise': {'value_type': NONNEGATIVE, 'default': 0.1},
        'holdout': {'value_type': SIZE, 'default': 200},
        'path': {'value_type': optional(String()), 'default': None},
        'label_column': {'value_type': String(), 'default': 'label'},
        'task': {'value_type': optional(TASK), 'default': None},
        'holdout_fraction': {
            'value_type': Constrained(Real(), (unit_interval(True, True),)),
            'default': 0.3,
        },
    }
    @property
    def synthetic(self):
        """True if the data come from a synthetic source."""
        return self['source'] != 'csv'
    @property
    def task(self):
        """The task of the configured data."""
        if self['source'] == 'blobs':
            return 'binary'
        if self['source'] == 'linear':
            return 'regression'
        return self['task'] or 'binary'
    def source_spec(self):
        """Return the synthetic source spec of this config."""
        return {
            'kind': self['source'],
            'm': self['m'],
            'd': self['d'],
            'separation': self['separation'],
            'noise': self['noise'],
        }

class LossConfig(metaclass=ModelledDict):
    """The loss.

    'kind' defaults to classification01 for classification tasks and squared
    for regression. 'M' defaults to 1 for margin losses and to a bound observed
    on the data otherwise.
    """
    model = {
        'kind': {'value_type': optional(KIND), 'default': None},
        'gamma': {'value_type': optional(POSITIVE), 'default': None},
        'M': {'value_type': optional(POSITIVE), 'default': None},
    }

class StabilityConfig(metaclass=ModelledDict):
    """Monte-Carlo stability estimation settings.

    'm' defaults to the data size. 'profile' lists further training sizes to
    estimate at.
    """
    model = {
        'mode': {
            'value_type': Enum(('hypothesis', 'pointwise', 'both')),
            'default': 'hypothesis',
        },
        'trials': {'value_type': COUNT, 'default': 400},
        'policy': {'value_type': POLICY, 'default': 'random-i'},
        'index': {'value_type': Constrained(Integer(), (at_least(0),)), 'default': 0},
        'scan': {
            'value_type': Choice((
                COUNT,
                SequenceOf(Constrained(Integer(), (at_least(0),)), length=(1, None)),
            )),
            'default': 10,
        },
        'm': {'value_type': optional(SIZE), 'default': None},
        'profile': {'value_type': SequenceOf(SIZE), 'default': []},
    }

class CalculatorType(ValueType):
    """A value type accepting a bound calculator call.

    A call is a dict naming the 'bound' in `names`, with the calculator's
    keyword arguments as its other pairs.
    """
    def __init__(self, names):
        super().__init__()
        self._names = Enum(names)
    def check(self, val):
        return isinstance(val, dict)
    def __call__(self, val):
        if not self.check(val):
            raise TypeError(f'expected a calculator object, got {val!r}')
        if 'bound' not in val:
            raise ValueError('missing values at bound')
        self._names(val['bound'])
        return dict(val)

CALCULATOR_NAMES = (
    'stacking',
    'bag-stacking',
    'dag-stacking',
    'bagging',
    'subbagging',
    'combiner-on-bagging',
    'inclusion-tail',
    'gen',
    'gen-subbagging',
    'gen-bagging',
)

class BoundsConfig(metaclass=ModelledDict):
    """Bound settings and any explicit 'calculators' to evaluate."""
    model = {
        'delta': {
            'value_type': Constrained(Real(), (unit_interval(True, True),)),
            'default': 0.05,
        },
        'M': {'value_type': optional(POSITIVE), 'default': None},
        'B': {'value_type': POSITIVE, 'default': 1.0},
        'bag_q_mode': {'value_type': BAG_Q_MODE, 'default': 'paper'},
        'dag_q_mode': {'value_type': DAG_Q_MODE, 'default': 'paper-example'},
        'occupancy': {'value_type': OCCUPANCY, 'default': 'auto'},
        'calculators': {
            'value_type': SequenceOf(CalculatorType(CALCULATOR_NAMES)),
            'default': [],
        },
    }

class EquivalenceConfig(metaclass=ModelledDict):
    """Settings of the bag-stacking and weighted bagging equivalence check.

    'T' members of learner 'base' are trained on bootstrap replicates, or
    subsamples of size 'p' if 'sampling' is 'subsample'. 'combiner' is the
    linear combiner. 'self_test' perturbs one weight by 1e-6 to check the
    detector.
    """
    model = {
        'base': {
            'value_type': LEARNER_SPEC,
            'default': {'algorithm': 'ridge', 'lambda': 1.0},
        },
        'T': {'value_type': COUNT, 'default': 5},
        'sampling': {
            'value_type': Enum(('bootstrap', 'subsample')),
            'default': 'bootstrap',
        },
        'p': {'value_type': optional(COUNT), 'default': None},
        'combiner': {
            'value_type': LEARNER_SPEC,
            'default': {'algorithm': 'ridge', 'lambda': 0.01},
        },
        'probes': {'value_type': COUNT, 'default': 100},
        'tolerance': {'value_type': POSITIVE, 'default': 1e-9},
        'self_test': {'value_type': Boolean(), 'default': False},
    }

class RunConfig(metaclass=ModelledDict):
    """Experiment pipeline switches."""
    model = {
        'loo': {'value_type': Boolean(), 'default': True},
        'estimate_stability': {'value_type': Boolean(), 'default': True},
        'margins': {
            'value_type': SequenceOf(Real(), length=(1, None)),
            'default': [_ / 10 for _ in range(-20, 21)],
        },
    }

class ExperimentConfig(metaclass=ModelledDict):
    """A complete experiment configuration."""
    model = {
        'seed': {
            'value_type': Constrained(Integer(), (Interval(0, MASTER_MAX),)),
            'default': 0,
        },
        'threads': {'value_type': optional(COUNT), 'default': None},
        'data': {'value_type': DataConfig.value_type(), 'default': {}},
        'recipe': {'value_type': RECIPE, 'default': {'kind': 'learner'}},
        'loss': {'value_type': LossConfig.value_type(), 'default': {}},
        'stability': {'value_type': StabilityConfig.value_type(), 'default': {}},
        'bounds': {'value_type': BoundsConfig.value_type(), 'default': {}},
        'equivalence': {'value_type': EquivalenceConfig.value_type(), 'default': {}},
        'experiment': {'value_type': RunConfig.value_type(), 'default': {}},
    }

def parse_override(text):
    """Return (path, value) from a dotted override 'a.b.c=value'.

    The value is parsed as JSON, falling back to the literal string.
    """
    try:
        (path, raw) = text.split('=', 1)
    except ValueError:
        raise ValueError(f'override {text!r} is not of the form path=value') from None
    path = path.strip()
    if not path or '' in path.split('.'):
        raise ValueError(f'bad override path {path!r}')
    try:
        val = json.loads(raw)
    except ValueError:
        val = raw
    return (path.split('.'), val)

def apply_override(raw, keys, val):
    """Set `val` at the nested `keys` of dict `raw`, creating sections."""
    node = raw
    for key in keys[:-1]:
        child = node.setdefault(key, {})
        if not isinstance(child, dict):
            raise ValueError(f'cannot override inside non-object {key!r}')
        node = child
    node[keys[-1]] = val
    return raw

def build_config(raw=None, overrides=(), seed=None):
    """Return the :class:`ExperimentConfig` from `raw`, `overrides` and `seed`.

    `raw` is the decoded config document (default empty), `overrides` dotted
    override strings applied in order, then `seed` (if not None) replaces the
    master seed. Raise :class:`TypeError` or :class:`ValueError` if the result
    is not a valid configuration.
    """
    raw = {} if raw is None else json.loads(json.dumps(raw))
    if not isinstance(raw, dict):
        raise TypeError(f'expected a config object, got {raw!r}')
    for text in overrides:
        apply_override(raw, *parse_override(text))
    if seed is not None:
        raw['seed'] = seed
    return ExperimentConfig(raw)
