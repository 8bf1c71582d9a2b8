### SPDX-License-Identifier: GPL-2.0-or-later

"""Bagging and subbagging.

Member t (counting from 1) is trained on the replicate drawn from substream
('bootstrap', t) or ('subsample', t) of the seed, so replicates are
independent of each other and of the order members are trained in.
"""

import logging

from rsk_stab.core.parallel import ordered_map
from rsk_stab.core.resample import (
    ResampleError,
    bootstrap_indices,
    subsample_indices,
)
from rsk_stab.core.seed import as_seed
from rsk_stab.learners.learner import LEARNER_SPEC
from .ensemble import (
    EnsembleModel,
    aggregation_for,
)

_logger = logging.getLogger(__name__)

def train_members(specs, data, replicates, threads=None):
    """Return one model per replicate, trained on `data` at its indices.

    `specs` is one learner spec for every member, or a sequence of one spec
    per replicate. A member failure raises :class:`TrainingError
    <rsk_stab.core.parallel.TrainingError>` with the member index.
    """
    replicates = list(replicates)
    if isinstance(specs, dict):
        specs = [specs] * len(replicates)
    specs = [LEARNER_SPEC(_) for _ in specs]
    if len(specs) != len(replicates):
        raise ValueError(f'{len(specs)} specs for {len(replicates)} replicates')
    def member(pair):
        (spec, replicate) = pair
        return spec.train(data.take(replicate.indices))
    return ordered_map(member, zip(specs, replicates), threads, context='member')

def bootstrap_replicates(m, T, seed): # pylint: disable=invalid-name
    """Return `T` bootstrap resamples of range(`m`) derived from `seed`."""
    seed = as_seed(seed)
    return [bootstrap_indices(m, seed.derive('bootstrap', t)) for t in range(1, T + 1)]

def subsample_replicates(m, T, p, seed): # pylint: disable=invalid-name
    """Return `T` independent size `p` subsamples of range(`m`) from `seed`."""
    seed = as_seed(seed)
    return [subsample_indices(m, p, seed.derive('subsample', t)) for t in range(1, T + 1)]

def _check_count(T): # pylint: disable=invalid-name
    if T < 1:
        raise ValueError(f'member count T must be at least 1, got {T}')

def bagged(spec, data, replicates, threads=None):
    """Return the mean or plurality ensemble of `spec` over `replicates`."""
    members = train_members(spec, data, replicates, threads)
    return EnsembleModel(
        data.task, data.m, members, aggregation_for(data.task), replicates,
        n_classes=len(data.labels),
    )

def bagging_train(spec, data, T, seed, threads=None): # pylint: disable=invalid-name
    """Return a bagged ensemble of `T` members of learner `spec`."""
    _check_count(T)
    _logger.debug('bagging %d members on m=%d', T, data.m)
    return bagged(spec, data, bootstrap_replicates(data.m, T, seed), threads)

def subbagging_train(spec, data, T, p, seed, threads=None): # pylint: disable=invalid-name,too-many-arguments
    """Return a subbagged ensemble of `T` members on size `p` subsamples."""
    _check_count(T)
    if not 1 <= p <= data.m:
        raise ResampleError(f'subsample size {p} outside [1, {data.m}]')
    _logger.debug('subbagging %d members of p=%d on m=%d', T, p, data.m)
    return bagged(spec, data, subsample_replicates(data.m, T, p, seed), threads)
