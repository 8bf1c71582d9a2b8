### SPDX-License-Identifier: GPL-2.0-or-later

"""Ensemble models: trained members and an aggregation rule.

The aggregation of member outputs f_1(x)..f_T(x) is one of:

* 'mean': the mean output

* 'plurality': the most voted class. Binary members vote by the sign of their
  output (a zero output abstains); multiclass members vote their class index.
  Ties go to the smallest class, -1 for binary tasks.

* 'weighted': sum_t theta_t f_t(x)

* 'adaboost': sum_t alpha_t f_t(x)

* 'combiner': g(f_1(x), .., f_T(x)) for a trained combiner g

A binary ensemble predicts the sign of its aggregated score, zero if the score
is zero. Margin losses are evaluated on the score itself (see
:meth:`EnsembleModel.score_all`).
"""

import numpy as np

from rsk_stab.enforce.value import Enum
from rsk_stab.core.resample import ResampleIndices
from rsk_stab.learners.learner import (
    TrainedModel,
    model_from_dict,
    register_model,
)

AGGREGATION = Enum((
    'mean',
    'plurality',
    'weighted',
    'adaboost',
    'combiner',
))

def meta_features(members, X): # pylint: disable=invalid-name
    """Return the (n, T) matrix of each member's outputs at the rows of `X`."""
    return np.column_stack([member.predict_all(X) for member in members])

def plurality(outputs, task, n_classes=0):
    """Return the plurality vote over each row of member `outputs`."""
    if task == 'binary':
        positive = np.sum(outputs > 0, axis=1)
        negative = np.sum(outputs < 0, axis=1)
        return np.where(positive > negative, 1.0, -1.0)
    return np.array([
        float(np.argmax(np.bincount(row.astype(int), minlength=n_classes)))
        for row in outputs
    ])

def aggregation_for(task):
    """Return the unweighted aggregation for `task`: mean or plurality."""
    return 'mean' if task == 'regression' else 'plurality'

@register_model
class EnsembleModel(TrainedModel):
    """A trained ensemble.

    `members` is a nonempty sequence of trained models and `member_indices` the
    matching resamples they were trained on (None where not recorded).
    `weights` holds theta or alpha for the 'weighted' and 'adaboost'
    aggregations; `combiner` is the trained combiner for 'combiner'.
    `n_classes` is the number of classes of a multiclass task.
    """
    algorithm_tag = 'ensemble'
    def __init__(self, task, m, members, aggregation, member_indices=None, weights=None, combiner=None, n_classes=0): # pylint: disable=too-many-arguments
        members = tuple(members)
        if not members:
            raise ValueError('an ensemble requires at least one member')
        super().__init__(task, m, members[0].d)
        aggregation = AGGREGATION(aggregation)
        if aggregation in ('weighted', 'adaboost'):
            weights = np.array(weights, dtype=float).reshape(-1)
            if weights.shape[0] != len(members):
                raise ValueError(
                    f'{weights.shape[0]} weights for {len(members)} members'
                )
            weights.setflags(write=False)
        else:
            weights = None
        if aggregation == 'combiner':
            if combiner is None or combiner.d != len(members):
                raise ValueError('combiner input dimension must equal T')
        else:
            combiner = None
        if member_indices is None:
            member_indices = (None,) * len(members)
        self._members = members
        self._member_indices = tuple(member_indices)
        self._aggregation = aggregation
        self._weights = weights
        self._combiner = combiner
        self._n_classes = int(n_classes)
    @property
    def members(self):
        """The trained members."""
        return self._members
    @property
    def member_indices(self):
        """The resample each member was trained on."""
        return self._member_indices
    @property
    def aggregation(self):
        """The aggregation rule."""
        return self._aggregation
    @property
    def weights(self):
        """The member weights theta or alpha, or None."""
        return self._weights
    @property
    def combiner(self):
        """The trained combiner, or None."""
        return self._combiner
    @property
    def T(self): # pylint: disable=invalid-name
        """The number of members."""
        return len(self._members)
    def member_outputs(self, X): # pylint: disable=invalid-name
        """Return the (n, T) member outputs at the rows of `X`."""
        return meta_features(self._members, self.check_features(X))
    def score_all(self, X): # pylint: disable=invalid-name
        """Return the real-valued ensemble output before any vote or sign."""
        outputs = self.member_outputs(X)
        if self._aggregation == 'mean':
            return outputs @ np.full(self.T, 1.0 / self.T)
        if self._aggregation in ('weighted', 'adaboost'):
            return outputs @ self._weights
        if self._aggregation == 'combiner':
            return self._combiner.predict_all(outputs)
        return plurality(outputs, self.task, self._n_classes)
    def predict_all(self, X):
        score = self.score_all(X)
        if self._aggregation == 'adaboost' or (
                self.task == 'binary' and self._aggregation != 'plurality'
        ):
            return np.sign(score)
        return score
    def staged(self, n):
        """Return this ensemble truncated to its first `n` members."""
        if self._aggregation == 'combiner':
            raise ValueError('a stacked ensemble cannot be truncated')
        if not 1 <= n <= self.T:
            raise ValueError(f'stage {n} outside [1, {self.T}]')
        return EnsembleModel(
            self.task, self.m, self._members[:n], self._aggregation,
            self._member_indices[:n],
            None if self._weights is None else self._weights[:n],
            n_classes=self._n_classes,
        )
    def params(self):
        return {
            'aggregation': self._aggregation,
            'members': [_.to_dict() for _ in self._members],
            'member_indices': [
                None if _ is None else {
                    'indices': np.asarray(_.indices).tolist(),
                    'with_replacement': bool(_.with_replacement),
                }
                for _ in self._member_indices
            ],
            'weights': None if self._weights is None else self._weights.tolist(),
            'combiner': None if self._combiner is None else self._combiner.to_dict(),
            'n_classes': self._n_classes,
        }
    @classmethod
    def from_params(cls, task, m, d, params):
        combiner = params['combiner']
        return cls(
            task, m,
            [model_from_dict(_) for _ in params['members']],
            params['aggregation'],
            [
                None if _ is None else ResampleIndices(
                    np.array(_['indices'], dtype=np.intp), _['with_replacement'],
                )
                for _ in params['member_indices']
            ],
            params['weights'],
            None if combiner is None else model_from_dict(combiner),
            params['n_classes'],
        )

def ensemble_predict(model, x):
    """Return the prediction of ensemble `model` at feature vector `x`."""
    return model.predict(x)
