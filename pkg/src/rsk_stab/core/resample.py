### SPDX-License-Identifier: GPL-2.0-or-later

"""Bootstrap and subsample replicates of a dataset."""

from collections import namedtuple

import numpy as np

from .seed import as_seed

ResampleIndices = namedtuple('ResampleIndices', ('indices', 'with_replacement'))

class ResampleError(ValueError):
    """An exception indicating an invalid resample request."""

def identity(m):
    """Return the identity resample of a size `m` dataset."""
    return ResampleIndices(np.arange(m), False)

def bootstrap_indices(m, seed):
    """Return m indices drawn uniformly with replacement from range(`m`)."""
    if m < 1:
        raise ResampleError('bootstrap of an empty dataset')
    gen = as_seed(seed).generator()
    return ResampleIndices(gen.integers(0, m, size=m), True)

def subsample_indices(m, p, seed):
    """Return `p` distinct indices, uniform over size `p` subsets of range(`m`)."""
    if not 1 <= p <= m:
        raise ResampleError(f'subsample size {p} outside [1, {m}]')
    gen = as_seed(seed).generator()
    return ResampleIndices(gen.permutation(m)[:p], False)

def bootstrap_sample(data, seed):
    """Return (replicate, indices) for a bootstrap sample of `data`."""
    resample = bootstrap_indices(data.m, seed)
    return (data.take(resample.indices), resample)

def subsample(data, p, seed):
    """Return (replicate, indices) for a size `p` subsample of `data`."""
    resample = subsample_indices(data.m, p, seed)
    return (data.take(resample.indices), resample)

def distinct_fraction(resample):
    """Return the fraction of distinct indices in `resample`."""
    return np.unique(resample.indices).shape[0] / len(resample.indices)
