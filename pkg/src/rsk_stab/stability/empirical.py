### SPDX-License-Identifier: GPL-2.0-or-later

"""Monte-Carlo estimators of hypothesis and pointwise hypothesis stability.

Each trial draws a fresh training set D of size m and a fresh point z from a
synthetic source, picks an index i and records a loss difference:

* 'hypothesis': |l(f_D, z) - l(f_D\\i, z)|, D\\i being D without example i

* 'pointwise': |l(f_D, z_i) - l(f_D', z_i)|, D' being D with z in place of z_i

Trial t uses substream ('trial', t) of the seed for its data, point, index and
training. Both models of a trial are trained from the same substream, so a
recipe's internal resampling scheme is held fixed while its training set
changes. Trials may run concurrently; the estimate reduces the differences in
trial order.

Index policies:

* 'random-i': i uniform per trial

* 'fixed-i': the given index in every trial

* 'max-over-scanned-i': every scanned index in every trial; the estimate is
  that of the index with the largest mean difference
"""

import logging

import numpy as np

from rsk_stab.enforce.value import (
    Integer,
    Real,
    String,
    Enum,
    Constrained,
    optional,
)
from rsk_stab.enforce.constraint import at_least
from rsk_stab.model import ModelledDict
from rsk_stab.core.data import (
    remove_example,
    replace_example,
)
from rsk_stab.core.parallel import ordered_map
from rsk_stab.core.seed import as_seed

_logger = logging.getLogger(__name__)

MODE = Enum(('hypothesis', 'pointwise'))
POLICY = Enum(('random-i', 'fixed-i', 'max-over-scanned-i'))

# comparisons allow the estimate this many standard errors above the bound
SIGMAS = 3

class LossKindMismatchError(ValueError):
    """An exception indicating an estimate and bound for different losses."""
    def __init__(self, estimate_loss, bound_loss):
        super().__init__(f'estimate for {estimate_loss} loss, bound for {bound_loss}')
        self.estimate_loss = estimate_loss
        self.bound_loss = bound_loss

class StabilityEstimate(metaclass=ModelledDict):
    """A Monte-Carlo stability estimate with its standard error."""
    model = {
        'mean': {'value_type': Constrained(Real(), (at_least(0),)), 'mandatory': True},
        'stderr': {'value_type': Constrained(Real(), (at_least(0),)), 'mandatory': True},
        'trials': {'value_type': Constrained(Integer(), (at_least(1),)), 'mandatory': True},
        'mode': {'value_type': MODE, 'mandatory': True},
        'policy': {'value_type': POLICY, 'mandatory': True},
        'index': {'value_type': optional(Integer()), 'default': None},
        'loss': {'value_type': String(), 'mandatory': True},
        'm': {'value_type': Constrained(Integer(), (at_least(2),)), 'mandatory': True},
    }

def scan_indices(m, scan):
    """Return the sorted indices to scan: `scan` itself, or `scan` evenly spaced."""
    if isinstance(scan, int):
        if scan < 1:
            raise ValueError(f'scan count must be at least 1, got {scan}')
        return sorted(set(int(round(_)) for _ in np.linspace(0, m - 1, min(scan, m))))
    indices = sorted(set(int(_) for _ in scan))
    if not indices or indices[0] < 0 or indices[-1] >= m:
        raise ValueError(f'scan indices must be in [0, {m})')
    return indices

def _differences(recipe, source, m, kind, mode, seed, indices):
    """Return the loss differences of one trial at each of `indices`.

    `indices` is None to draw one index uniformly.
    """
    data = source.sample(m, seed.derive('data'))
    point = source.draw(seed.derive('point'))
    if indices is None:
        indices = [int(seed.derive('index').generator().integers(m))]
    train_seed = seed.derive('train')
    full = recipe.train(data, train_seed)
    differences = []
    for i in indices:
        if mode == 'hypothesis':
            perturbed = recipe.train(remove_example(data, i), train_seed)
            at = point
        else:
            perturbed = recipe.train(replace_example(data, i, point), train_seed)
            at = data[i]
        (before, after) = (
            kind(model.score_all(np.reshape(at.x, (1, -1)))[0], at)
            for model in (full, perturbed)
        )
        differences.append(abs(before - after))
    return differences

def _summary(differences):
    differences = np.asarray(differences, dtype=float)
    n = differences.shape[0]
    stderr = float(np.std(differences, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return (float(np.mean(differences)), stderr)

def estimate_stability(recipe, source, m, kind, trials=400, policy='random-i', seed=0, mode='hypothesis', index=0, scan=10, threads=None): # pylint: disable=too-many-arguments,too-many-locals
    """Return the :class:`StabilityEstimate` of trainer `recipe`.

    `source` is a synthetic source (see :mod:`rsk_stab.core.synthetic`) and
    `kind` the loss. `index` is the index of the 'fixed-i' policy and `scan`
    the indices (or a count of evenly spaced indices) of the
    'max-over-scanned-i' policy. A trial failure raises
    :class:`TrainingError <rsk_stab.core.parallel.TrainingError>` with the
    trial index.
    """
    mode = MODE(mode)
    policy = POLICY(policy)
    if m < 2:
        raise ValueError(f'stability estimation requires m >= 2, got {m}')
    if trials < 1:
        raise ValueError(f'trials must be at least 1, got {trials}')
    seed = as_seed(seed)
    if policy == 'random-i':
        indices = None
    elif policy == 'fixed-i':
        if not 0 <= index < m:
            raise ValueError(f'index {index} outside [0, {m})')
        indices = [index]
    else:
        indices = scan_indices(m, scan)
    _logger.info('estimating %s stability: m=%d, %d trials, %s', mode, m, trials, policy)
    def trial(t):
        return _differences(
            recipe, source, m, kind, mode, seed.derive('trial', t), indices,
        )
    table = np.array(ordered_map(trial, range(trials), threads, context='trial'))
    summaries = [_summary(table[:, j]) for j in range(table.shape[1])]
    best = max(range(len(summaries)), key=lambda j: (summaries[j][0], -j))
    (mean, stderr) = summaries[best]
    return StabilityEstimate({
        'mean': mean,
        'stderr': stderr,
        'trials': trials,
        'mode': mode,
        'policy': policy,
        'index': None if indices is None else indices[best],
        'loss': kind.kind,
        'm': m,
    })

def estimate_hypothesis_stability(recipe, source, m, kind, trials=400, policy='random-i', seed=0, **options): # pylint: disable=too-many-arguments
    """Return the hypothesis stability estimate; see :func:`estimate_stability`."""
    return estimate_stability(
        recipe, source, m, kind, trials, policy, seed, 'hypothesis', **options,
    )

def estimate_pointwise_hypothesis_stability(recipe, source, m, kind, trials=400, policy='random-i', seed=0, **options): # pylint: disable=too-many-arguments
    """Return the pointwise hypothesis stability estimate; see :func:`estimate_stability`."""
    return estimate_stability(
        recipe, source, m, kind, trials, policy, seed, 'pointwise', **options,
    )

def estimate_stability_profile(recipe, source, ms, kind, trials=400, policy='random-i', seed=0, mode='hypothesis', **options): # pylint: disable=too-many-arguments
    """Return the list of stability estimates at each training size in `ms`."""
    return [
        estimate_stability(
            recipe, source, m, kind, trials, policy, seed, mode, **options,
        )
        for m in ms
    ]

def compare_to_bound(estimate, bound):
    """Return a comparison record of `estimate` against BoundResult `bound`.

    The estimate satisfies the bound if its mean is at most the bound plus
    three standard errors. An unknown bound is not applicable. Raise
    :class:`LossKindMismatchError` if the bound applies to another loss.
    """
    if bound.get('loss') not in (None, estimate['loss']):
        raise LossKindMismatchError(estimate['loss'], bound['loss'])
    record = {
        'mode': estimate['mode'],
        'm': estimate['m'],
        'estimate': estimate['mean'],
        'stderr': estimate['stderr'],
        'bound': bound['value'],
        'formula': bound['formula'],
    }
    if bound['value'] is None:
        record.update(status='not-applicable', satisfied=None, slack=None)
        return record
    satisfied = estimate['mean'] <= bound['value'] + SIGMAS * estimate['stderr']
    record.update(
        status='satisfied' if satisfied else 'violated',
        satisfied=satisfied,
        slack=bound['value'] - estimate['mean'],
    )
    return record
