### SPDX-License-Identifier: GPL-2.0-or-later

"""AdaBoost.M1 for binary classification.

Importances start uniform and are kept normalised to sum one. Round t trains
the weak learner with the current importances, computes its weighted error
err_t (a zero output counts as a miss), sets alpha_t = log((1 - err_t) / err_t)
and multiplies the importance of each missed example by exp(alpha_t).

Boosting stops early when a round is degenerate:

* err_t = 0: the member is added with alpha_t = log(1e12), then boosting stops

* err_t >= 0.5: boosting stops before adding the member, except in the first
  round where the member is kept with alpha_t = 0 so that the ensemble is not
  empty
"""

import logging
from collections import namedtuple
from math import log

import numpy as np

from rsk_stab.learners.learner import (
    LEARNER_SPEC,
    IncompatibleTaskError,
)
from .ensemble import EnsembleModel

_logger = logging.getLogger(__name__)

ALPHA_PERFECT = log(1e12)

Round = namedtuple('Round', ('model', 'error', 'alpha', 'importances'))

def adaboost_alpha(err):
    """Return the member weight for weighted error `err` in [0, 1)."""
    if not 0 <= err < 1:
        raise ValueError(f'weighted error {err} outside [0, 1)')
    if err == 0:
        return ALPHA_PERFECT
    return log((1 - err) / err)

def misses(model, data):
    """Return the 0/1 vector of examples of `data` misclassified by `model`."""
    return (data.y * model.predict_all(data.X) <= 0).astype(float)

def boost(weak_spec, data, T): # pylint: disable=invalid-name
    """Yield one :class:`Round` per boosting round, at most `T`.

    Each round records the importances it was trained with.
    """
    if T < 1:
        raise ValueError(f'round count T must be at least 1, got {T}')
    spec = LEARNER_SPEC(weak_spec)
    if data.task != 'binary':
        raise IncompatibleTaskError('adaboost', data.task)
    if not spec.weighted:
        raise IncompatibleTaskError(
            spec.algorithm, data.task, f'{spec.algorithm} ignores weights',
        )
    importances = np.full(data.m, 1.0 / data.m)
    for t in range(T):
        model = spec.train(data, weights=importances)
        missed = misses(model, data)
        err = float(importances @ missed / importances.sum())
        if err >= 0.5:
            _logger.warning('adaboost round %d: weighted error %g, stopping', t + 1, err)
            if t == 0:
                yield Round(model, err, 0.0, importances)
            return
        alpha = adaboost_alpha(err)
        yield Round(model, err, alpha, importances)
        if err == 0:
            _logger.info('adaboost round %d: zero weighted error, stopping', t + 1)
            return
        importances = importances * np.exp(alpha * missed)
        importances = importances / importances.sum()

def adaboost_train(weak_spec, data, T): # pylint: disable=invalid-name
    """Return the AdaBoost.M1 ensemble of at most `T` weak learners."""
    rounds = list(boost(weak_spec, data, T))
    _logger.debug('adaboost kept %d of %d rounds', len(rounds), T)
    return EnsembleModel(
        data.task, data.m,
        [_.model for _ in rounds],
        'adaboost',
        weights=[_.alpha for _ in rounds],
    )
