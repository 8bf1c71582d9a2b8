### SPDX-License-Identifier: GPL-2.0-or-later

"""Learner specifications and trained models.

A learner specification is a modelled dict (see :mod:`rsk_stab.model`) whose
'algorithm' pair names the algorithm; the other pairs are its hyperparameters.
Specification classes register themselves by algorithm, so that any plain dict
with an 'algorithm' pair can be formed into the matching specification by
:data:`LEARNER_SPEC`.

Training a specification on a dataset yields a :class:`TrainedModel`, an
immutable predictor which can be serialised with :meth:`TrainedModel.to_dict`
and restored with :func:`model_from_dict`.
"""

import numpy as np

from rsk_stab.enforce.value import (
    ValueType,
    Enum,
)
from rsk_stab.core.parallel import TrainingError

LEARNERS = {}
MODELS = {}

class IncompatibleTaskError(TrainingError):
    """An exception indicating `algorithm` cannot learn a `task` dataset."""
    def __init__(self, algorithm, task, reason=None):
        super().__init__(reason or f'{algorithm} does not support {task} tasks')
        self.algorithm = algorithm
        self.task = task

class WeightError(ValueError):
    """An exception indicating invalid per-example weights."""

def register_learner(cls):
    """Register learner specification class `cls` by its algorithm tag."""
    LEARNERS[cls.algorithm_tag] = cls
    return cls

def register_model(cls):
    """Register trained model class `cls` by its algorithm tag."""
    MODELS[cls.algorithm_tag] = cls
    return cls

def algorithm_pair(tag):
    """Return the pair model of the 'algorithm' pair for `tag`."""
    return {'value_type': Enum((tag,)), 'default': tag}

def normalise_weights(weights, m):
    """Return `weights` scaled to mean one, or ones if `weights` is None.

    Raise :class:`WeightError` if `weights` is not a length `m` vector of
    nonnegative finite values with a positive sum.
    """
    if weights is None:
        return np.ones(m)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if weights.shape[0] != m:
        raise WeightError(f'expected {m} weights, got {weights.shape[0]}')
    if not np.all(np.isfinite(weights)) or np.any(weights < 0):
        raise WeightError('weights must be finite and nonnegative')
    total = weights.sum()
    if not total > 0:
        raise WeightError('weights must have a positive sum')
    return weights * (m / total)

class Learner():
    """A mixin for learner specification classes.

    Subclasses set :attr:`algorithm_tag`, :attr:`tasks` (the task kinds the
    algorithm learns) and :attr:`weighted` (whether it honours per-example
    weights), and implement :meth:`fit`.
    """
    algorithm_tag = None
    tasks = ()
    weighted = False
    @property
    def algorithm(self):
        """The algorithm tag."""
        return self['algorithm']
    def check_task(self, task):
        """Raise :class:`IncompatibleTaskError` unless this learns `task`."""
        if task not in self.tasks:
            raise IncompatibleTaskError(self.algorithm, task)
    def fit(self, data, weights):
        """Return a :class:`TrainedModel` fitted to `data`.

        `weights` is a length m vector with mean one.
        """
        raise NotImplementedError
    def train(self, data, seed=None, weights=None): # pylint: disable=unused-argument
        """Return a :class:`TrainedModel` trained on `data`.

        `seed` is accepted so that a specification is a trainer (see
        :mod:`rsk_stab.core.risk`); training is deterministic. Raise
        :class:`IncompatibleTaskError` if this cannot learn the task of
        `data`, or if `weights` are given and this ignores weights.
        """
        self.check_task(data.task)
        if weights is not None and not self.weighted:
            raise IncompatibleTaskError(
                self.algorithm, data.task, f'{self.algorithm} ignores weights',
            )
        return self.fit(data, normalise_weights(weights, data.m))

class LearnerSpecType(ValueType):
    """A value type forming learner specifications from dicts.

    The 'algorithm' pair selects the registered specification class; the
    remaining pairs are enforced by that class's model.
    """
    def check(self, val):
        return isinstance(val, dict)
    def __call__(self, val):
        if not self.check(val):
            raise TypeError(f'expected a learner object, got {val!r}')
        try:
            cls = LEARNERS[val['algorithm']]
        except KeyError:
            raise ValueError(
                f'unknown algorithm {val.get("algorithm")!r}, expected one of '
                + ', '.join(sorted(LEARNERS))
            ) from None
        return val if isinstance(val, cls) else cls(val)
    def describe(self):
        return 'learner'

LEARNER_SPEC = LearnerSpecType()

class TrainedModel():
    """A base class for trained models.

    `task` is the task kind learnt from a size `m` dataset of dimension `d`.
    Subclasses implement :meth:`predict_all` and :meth:`params`.
    """
    algorithm_tag = None
    def __init__(self, task, m, d):
        self._task = task
        self._m = int(m)
        self._d = int(d)
    @property
    def algorithm(self):
        """The algorithm tag."""
        return self.algorithm_tag
    @property
    def task(self):
        """The task kind."""
        return self._task
    @property
    def m(self):
        """The training set size."""
        return self._m
    @property
    def d(self):
        """The feature dimension."""
        return self._d
    def check_features(self, X): # pylint: disable=invalid-name
        """Return `X` as an (n, d) array, raising :class:`ValueError` on mismatch."""
        X = np.array(X, dtype=float, ndmin=2)
        if X.ndim != 2 or X.shape[1] != self._d:
            raise ValueError(f'expected dimension {self._d}, got {X.shape[-1]}')
        return X
    def predict_all(self, X): # pylint: disable=invalid-name
        """Return the array of predictions at each row of `X`."""
        raise NotImplementedError
    def score_all(self, X): # pylint: disable=invalid-name
        """Return the real-valued output at each row of `X`.

        A binary margin loss is evaluated on this output. It is the prediction
        itself unless a subclass thresholds its score.
        """
        return self.predict_all(X)
    def predict(self, x):
        """Return the prediction at feature vector `x`."""
        return float(self.predict_all(np.asarray(x, dtype=float).reshape(1, -1))[0])
    def params(self):
        """Return a dict of the fitted parameters."""
        raise NotImplementedError
    def to_dict(self):
        """Return a JSON-encodable dict describing this model."""
        return {
            'algorithm': self.algorithm_tag,
            'task': self._task,
            'm': self._m,
            'd': self._d,
            'params': self.params(),
        }
    @classmethod
    def from_params(cls, task, m, d, params):
        """Return a model of this class from the output of :meth:`to_dict`."""
        raise NotImplementedError

def model_from_dict(dct):
    """Return the :class:`TrainedModel` described by `dct`.

    Raise :class:`ValueError` if the algorithm is not known.
    """
    try:
        cls = MODELS[dct['algorithm']]
    except KeyError:
        raise ValueError(f'unknown model algorithm {dct.get("algorithm")!r}') from None
    return cls.from_params(dct['task'], dct['m'], dct['d'], dct['params'])

def train(spec, data, weights=None):
    """Return the model trained by learner `spec` on `data`, with `weights`."""
    return LEARNER_SPEC(spec).train(data, weights=weights)

def predict(model, x):
    """Return the prediction of `model` at feature vector `x`."""
    return model.predict(x)
