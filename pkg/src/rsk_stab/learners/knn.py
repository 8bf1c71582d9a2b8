### SPDX-License-Identifier: GPL-2.0-or-later

"""k-nearest neighbours.

Neighbours are ranked by Euclidean distance; ties go to the lower training
index. With k > m every training point is a neighbour. Regression predicts
the neighbours' mean label, binary classification the mean of their ±1 labels
(a score in [-1, 1]) and multiclass classification the plurality class, ties
going to the smallest class index.
"""

import numpy as np
from scipy.spatial.distance import cdist

from rsk_stab.enforce.value import (
    Integer,
    Constrained,
)
from rsk_stab.enforce.constraint import at_least
from rsk_stab.model import ModelledDict
from .learner import (
    Learner,
    TrainedModel,
    algorithm_pair,
    register_learner,
    register_model,
)

@register_model
class KnnModel(TrainedModel):
    """A trained k-NN model: the stored training set and k."""
    algorithm_tag = 'knn'
    def __init__(self, task, k, X, y, n_classes=0): # pylint: disable=invalid-name,too-many-arguments
        X = np.array(X, dtype=float, ndmin=2)
        super().__init__(task, X.shape[0], X.shape[1])
        self._k = min(int(k), X.shape[0])
        self._X = X
        self._y = np.array(y, dtype=float)
        self._n_classes = int(n_classes)
        for arr in (self._X, self._y):
            arr.setflags(write=False)
    @property
    def k(self):
        """The effective number of neighbours, min(k, m)."""
        return self._k
    def neighbours(self, X): # pylint: disable=invalid-name
        """Return the (n, k) training indices of the neighbours of each row."""
        distances = cdist(self.check_features(X), self._X, 'sqeuclidean')
        return np.argsort(distances, axis=1, kind='stable')[:, :self._k]
    def predict_all(self, X):
        votes = self._y[self.neighbours(X)]
        if self.task != 'multiclass':
            return votes.mean(axis=1)
        counts = [
            np.bincount(row.astype(int), minlength=self._n_classes)
            for row in votes
        ]
        return np.array([float(np.argmax(_)) for _ in counts])
    def params(self):
        return {
            'k': self._k,
            'X': self._X.tolist(),
            'y': self._y.tolist(),
            'n_classes': self._n_classes,
        }
    @classmethod
    def from_params(cls, task, m, d, params):
        return cls(task, params['k'], params['X'], params['y'], params['n_classes'])

@register_learner
class KnnSpec(Learner, metaclass=ModelledDict):
    """k-NN with 'k' >= 1 neighbours."""
    algorithm_tag = 'knn'
    tasks = ('regression', 'binary', 'multiclass')
    model = {
        'algorithm': algorithm_pair('knn'),
        'k': {
            'value_type': Constrained(Integer(), (at_least(1),)),
            'default': 1,
        },
    }
    def fit(self, data, weights):
        return KnnModel(data.task, self['k'], data.X, data.y, len(data.labels))
