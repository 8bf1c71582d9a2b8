### SPDX-License-Identifier: GPL-2.0-or-later

"""Decision stumps for weighted binary classification.

A stump (j, t, s) predicts s if x_j > t, otherwise -s. Training scans every
feature j, every threshold t among -inf, the midpoints between consecutive
distinct values of feature j and +inf, and polarity s = +1 then -1, in that
order; a candidate replaces the best so far only if its weighted error is
strictly smaller.
"""

from math import inf

import numpy as np

from rsk_stab.model import ModelledDict
from .learner import (
    Learner,
    TrainedModel,
    algorithm_pair,
    register_learner,
    register_model,
)

def thresholds(values):
    """Return the candidate thresholds for a feature taking `values`."""
    distinct = np.unique(values)
    midpoints = (distinct[:-1] + distinct[1:]) / 2
    return np.concatenate(([-inf], midpoints, [inf]))

def scan(X, y, weights): # pylint: disable=invalid-name
    """Return (error, feature, threshold, polarity) of the best stump.

    The error is the weighted error over the total weight.
    """
    total = weights.sum()
    best = (inf, 0, -inf, 1)
    for j in range(X.shape[1]):
        candidates = thresholds(X[:, j])
        above = X[:, j][:, None] > candidates[None, :]
        # errors of polarity +1 (predict +1 above) and -1 per threshold
        wrong = np.where(above, y[:, None] < 0, y[:, None] > 0)
        errors = np.stack((weights @ wrong, weights @ ~wrong), axis=1) / total
        for (t, threshold) in enumerate(candidates):
            for (p, polarity) in enumerate((1, -1)):
                if errors[t, p] < best[0]:
                    best = (float(errors[t, p]), j, float(threshold), polarity)
    return best

@register_model
class StumpModel(TrainedModel):
    """A trained decision stump."""
    algorithm_tag = 'stump'
    def __init__(self, task, m, d, feature, threshold, polarity): # pylint: disable=too-many-arguments
        super().__init__(task, m, d)
        self._feature = int(feature)
        self._threshold = float(threshold)
        self._polarity = 1.0 if polarity > 0 else -1.0
    @property
    def feature(self):
        """The feature index j."""
        return self._feature
    @property
    def threshold(self):
        """The threshold t."""
        return self._threshold
    @property
    def polarity(self):
        """The polarity s."""
        return self._polarity
    def predict_all(self, X):
        above = self.check_features(X)[:, self._feature] > self._threshold
        return np.where(above, self._polarity, -self._polarity)
    def params(self):
        return {
            'feature': self._feature,
            'threshold': self._threshold,
            'polarity': self._polarity,
        }
    @classmethod
    def from_params(cls, task, m, d, params):
        return cls(
            task, m, d,
            params['feature'], params['threshold'], params['polarity'],
        )

@register_learner
class StumpSpec(Learner, metaclass=ModelledDict):
    """A decision stump minimising the weighted classification error."""
    algorithm_tag = 'stump'
    tasks = ('binary',)
    weighted = True
    model = {
        'algorithm': algorithm_pair('stump'),
    }
    def fit(self, data, weights):
        (_, feature, threshold, polarity) = scan(data.X, data.y, weights)
        return StumpModel(data.task, data.m, data.d, feature, threshold, polarity)
