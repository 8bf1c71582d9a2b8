### SPDX-License-Identifier: GPL-2.0-or-later

"""Empirical, leave-one-out and holdout risk estimators.

A model is a :class:`TrainedModel <rsk_stab.learners.learner.TrainedModel>`;
losses are evaluated on its `score_all(X)` output, one value per row of X.
A trainer is anything with a `train(data, seed)` method returning a model: a
learner spec or an ensemble recipe.
"""

import logging
from collections import namedtuple

import numpy as np

from .data import (
    DatasetError,
    EmptyDatasetError,
    remove_example,
)
from .parallel import ordered_map
from .seed import as_seed

_logger = logging.getLogger(__name__)

RiskEstimate = namedtuple('RiskEstimate', ('mean', 'stderr', 'n'))

def pointwise_losses(model, data, kind):
    """Return the array of losses of `model` on each example of `data`."""
    return kind.values(
        model.score_all(data.X), data.y, data.task == 'multiclass',
    )

def empirical_error(model, data, kind):
    """Return the mean loss of `model` over `data`."""
    return float(np.mean(pointwise_losses(model, data, kind)))

def loo_error(trainer, data, kind, seed, threads=None):
    """Return the leave-one-out error of `trainer` on `data`.

    Fold i trains on `data` without example i, seeded by the substream
    ('loo', i) of `seed`, and is evaluated on example i. A fold failure raises
    :class:`TrainingError <rsk_stab.core.parallel.TrainingError>` with the fold
    index.
    """
    if data.m < 2:
        raise DatasetError(f'leave-one-out requires m >= 2, got {data.m}')
    seed = as_seed(seed)
    multiclass = data.task == 'multiclass'
    def fold(i):
        _logger.debug('leave-one-out fold %d of %d', i, data.m)
        model = trainer.train(remove_example(data, i), seed.derive('loo', i))
        prediction = model.score_all(data.X[i:i + 1])[0]
        return kind(prediction, data[i], multiclass)
    folds = ordered_map(fold, range(data.m), threads, context='fold')
    return float(np.mean(folds))

def holdout_risk(model, holdout, kind):
    """Return the :class:`RiskEstimate` of `model` on `holdout`.

    The standard error is the sample standard deviation over the square root
    of the holdout size (zero for a single example).
    """
    if holdout is None or len(holdout) == 0:
        raise EmptyDatasetError('empty holdout')
    values = pointwise_losses(model, holdout, kind)
    n = values.shape[0]
    stderr = float(np.std(values, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return RiskEstimate(float(np.mean(values)), stderr, n)

def observed_bound(kind, data, predictions):
    """Return a data-derived loss bound M for a 'squared' or 'absolute' `kind`.

    The bound is (max|y| + max|f(x)|) for absolute loss and its square for
    squared loss, over `data` labels and the observed `predictions`.
    """
    span = float(np.max(np.abs(data.y)) + np.max(np.abs(predictions)))
    span = max(span, np.finfo(float).tiny)
    return span ** 2 if kind.kind == 'squared' else span
