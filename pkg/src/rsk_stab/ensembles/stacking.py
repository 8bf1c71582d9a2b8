### SPDX-License-Identifier: GPL-2.0-or-later

"""Stacking, bag-stacking and dag-stacking.

T base models are trained, then a combiner is trained on the meta-dataset whose
features are the base models' outputs at the training points and whose labels
are the original labels. Base outputs are fed to the combiner as raw scores.

Classical stacking trains every base model on the full dataset and by default
computes the meta-features by resubstitution. Out-of-fold meta-features are
available for classical stacking: the dataset is split into folds, and the
outputs at each fold come from base models trained without it.

Bag-stacking trains base model t on bootstrap replicate t and dag-stacking on
subsample t; the meta-features are always the trained members' outputs over
the full original dataset.
"""

import logging

import numpy as np

from rsk_stab.core.data import Dataset
from rsk_stab.core.parallel import ordered_map
from rsk_stab.core.resample import (
    ResampleError,
    ResampleIndices,
    identity,
)
from rsk_stab.core.seed import as_seed
from rsk_stab.learners.learner import LEARNER_SPEC
from .bagging import (
    train_members,
    bootstrap_replicates,
    subsample_replicates,
)
from .ensemble import (
    EnsembleModel,
    meta_features,
)

_logger = logging.getLogger(__name__)

def meta_dataset(data, features):
    """Return the meta-dataset of (n, T) `features` with the labels of `data`."""
    return Dataset(features, data.y, data.task, data.labels or None)

def fold_assignment(m, folds, seed):
    """Return the fold of each of `m` examples, balanced and seeded."""
    if not 2 <= folds <= m:
        raise ResampleError(f'fold count {folds} outside [2, {m}]')
    order = as_seed(seed).derive('folds').generator().permutation(m)
    assignment = np.empty(m, dtype=np.intp)
    assignment[order] = np.arange(m) % folds
    return assignment

def out_of_fold_features(specs, data, folds, seed, threads=None):
    """Return the (m, T) out-of-fold outputs of base learners `specs`."""
    assignment = fold_assignment(data.m, folds, seed)
    features = np.empty((data.m, len(specs)))
    def fold(k):
        train = np.flatnonzero(assignment != k)
        held = np.flatnonzero(assignment == k)
        members = train_members(specs, data, [ResampleIndices(train, False)] * len(specs))
        return (held, meta_features(members, data.X[held]))
    for (held, outputs) in ordered_map(fold, range(folds), threads, context='fold'):
        features[held] = outputs
    return features

def _combine(recipe, data, members, replicates, features):
    combiner = LEARNER_SPEC(recipe['combiner']).train(meta_dataset(data, features))
    return EnsembleModel(
        data.task, data.m, members, 'combiner', replicates,
        combiner=combiner, n_classes=len(data.labels),
    )

def stacking_train(recipe, data, seed, threads=None):
    """Return the classical stacking ensemble for `recipe`.

    `recipe` maps 'bases' to the base learner specs, 'combiner' to the
    combiner spec and 'meta_features' to 'resubstitution' or 'out-of-fold'
    (with 'folds').
    """
    specs = list(recipe['bases'])
    replicates = [identity(data.m)] * len(specs)
    members = train_members(specs, data, replicates, threads)
    if recipe.get('meta_features', 'resubstitution') == 'out-of-fold':
        features = out_of_fold_features(
            specs, data, recipe.get('folds', 5), seed, threads,
        )
    else:
        features = meta_features(members, data.X)
    _logger.debug('stacking %d bases on m=%d', len(specs), data.m)
    return _combine(recipe, data, members, replicates, features)

def sampling_replicates(recipe, m, seed):
    """Return the base replicates of `recipe` over range(`m`)."""
    T = len(recipe['bases']) # pylint: disable=invalid-name
    if recipe['sampling'] == 'bootstrap':
        return bootstrap_replicates(m, T, seed)
    if recipe['sampling'] == 'subsample':
        p = recipe.get('p')
        if p is None or not 1 <= p <= m:
            raise ResampleError(f'subsample size {p} outside [1, {m}]')
        return subsample_replicates(m, T, p, seed)
    raise ValueError(f'unknown sampling {recipe["sampling"]!r}')

def stacked_sampling_train(recipe, data, seed, threads=None):
    """Return the bag-stacking or dag-stacking ensemble for `recipe`.

    `recipe` is as for :func:`stacking_train` with 'sampling' 'bootstrap' or
    'subsample' (with 'p').
    """
    replicates = sampling_replicates(recipe, data.m, seed)
    members = train_members(list(recipe['bases']), data, replicates, threads)
    _logger.debug(
        '%s stacking %d bases on m=%d', recipe['sampling'], len(members), data.m,
    )
    return _combine(recipe, data, members, replicates, meta_features(members, data.X))
