### SPDX-License-Identifier: GPL-2.0-or-later

"""Baseline learners: a constant predictor and the label mean."""

import numpy as np

from rsk_stab.enforce.value import Real
from rsk_stab.model import ModelledDict
from .learner import (
    Learner,
    TrainedModel,
    algorithm_pair,
    register_learner,
    register_model,
)

class _ValueModel(TrainedModel):
    """A trained model predicting one value everywhere."""
    def __init__(self, task, m, d, value):
        super().__init__(task, m, d)
        self._value = float(value)
    @property
    def value(self):
        """The predicted value."""
        return self._value
    def predict_all(self, X):
        return np.full(self.check_features(X).shape[0], self._value)
    def params(self):
        return {'value': self._value}
    @classmethod
    def from_params(cls, task, m, d, params):
        return cls(task, m, d, params['value'])

@register_model
class ConstantModel(_ValueModel):
    """A trained constant predictor."""
    algorithm_tag = 'constant'

@register_model
class MeanModel(_ValueModel):
    """A trained label-mean predictor."""
    algorithm_tag = 'mean'

@register_learner
class ConstantSpec(Learner, metaclass=ModelledDict):
    """Predict 'value' whatever the training set."""
    algorithm_tag = 'constant'
    tasks = ('regression', 'binary', 'multiclass')
    weighted = True
    model = {
        'algorithm': algorithm_pair('constant'),
        'value': {'value_type': Real(), 'default': 0.0},
    }
    def fit(self, data, weights):
        return ConstantModel(data.task, data.m, data.d, self['value'])

@register_learner
class MeanSpec(Learner, metaclass=ModelledDict):
    """Predict the weighted mean label of the training set."""
    algorithm_tag = 'mean'
    tasks = ('regression', 'binary')
    weighted = True
    model = {
        'algorithm': algorithm_pair('mean'),
    }
    def fit(self, data, weights):
        value = weights @ data.y / weights.sum()
        return MeanModel(data.task, data.m, data.d, value)
