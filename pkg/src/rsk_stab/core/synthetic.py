### SPDX-License-Identifier: GPL-2.0-or-later

"""Synthetic data sources standing in for an unknown distribution.

A source is fixed by its parameters and a seed (the linear source draws its
coefficient vector from the seed), then samples datasets and single fresh
examples from seeds of their own.
"""

import numpy as np

from .data import (
    DatasetError,
    Dataset,
    Example,
)
from .seed import as_seed

class SourceError(DatasetError):
    """An exception indicating invalid synthetic source parameters."""

def _check(name, val, lower):
    if val < lower:
        raise SourceError(f'{name} must be at least {lower}, got {val}')

class Source():
    """A base class for synthetic sources of examples."""
    task = None
    def __init__(self, d):
        _check('d', d, 1)
        self._d = int(d)
    @property
    def d(self):
        """The feature dimension."""
        return self._d
    def sample(self, m, seed):
        """Return a :class:`Dataset` of `m` examples drawn using `seed`."""
        raise NotImplementedError
    def draw(self, seed):
        """Return one fresh :class:`Example` drawn using `seed`."""
        raise NotImplementedError
    def describe(self):
        """Return a dict describing this source."""
        raise NotImplementedError

class BlobsSource(Source):
    """Two unit-variance Gaussian blobs with ±1 labels.

    The blob for label y is centred at y * `separation` / 2 along the first
    axis. Samples are balanced: ceil(m/2) examples labelled +1, the rest -1,
    in random order. A fresh example has a uniformly random label.
    """
    task = 'binary'
    def __init__(self, d, separation):
        super().__init__(d)
        _check('separation', separation, 0)
        self._separation = float(separation)
    def _features(self, gen, y):
        X = gen.standard_normal((y.shape[0], self._d))
        X[:, 0] += y * self._separation / 2
        return X
    def sample(self, m, seed):
        _check('m', m, 2)
        gen = as_seed(seed).generator()
        n_pos = (m + 1) // 2
        y = np.concatenate((np.ones(n_pos), -np.ones(m - n_pos)))
        y = gen.permutation(y)
        return Dataset(self._features(gen, y), y, self.task)
    def draw(self, seed):
        gen = as_seed(seed).generator()
        y = np.array([1.0 if gen.random() < 0.5 else -1.0])
        return Example(self._features(gen, y)[0], float(y[0]))
    def describe(self):
        return {'kind': 'blobs', 'd': self._d, 'separation': self._separation}

class LinearSource(Source):
    """A linear regression source y = <w*, x> + noise.

    Features are standard normal; the noise is Gaussian with standard deviation
    `noise`. The coefficient vector w* is drawn once from `seed`.
    """
    task = 'regression'
    def __init__(self, d, noise, seed):
        super().__init__(d)
        _check('noise', noise, 0)
        self._noise = float(noise)
        gen = as_seed(seed).derive('coefficients').generator()
        self._coefficients = gen.standard_normal(self._d)
        self._coefficients.setflags(write=False)
    @property
    def coefficients(self):
        """The generator's coefficient vector w*."""
        return self._coefficients
    def _draw(self, gen, m):
        X = gen.standard_normal((m, self._d))
        y = X @ self._coefficients
        if self._noise > 0:
            y = y + self._noise * gen.standard_normal(m)
        return (X, y)
    def sample(self, m, seed):
        _check('m', m, 2)
        (X, y) = self._draw(as_seed(seed).generator(), m)
        return Dataset(X, y, self.task)
    def draw(self, seed):
        (X, y) = self._draw(as_seed(seed).generator(), 1)
        return Example(X[0], float(y[0]))
    def describe(self):
        return {'kind': 'linear', 'd': self._d, 'noise': self._noise}

def make_source(spec, seed):
    """Return the :class:`Source` for dict `spec` fixed by `seed`.

    `spec` has 'kind' 'blobs' (with 'd', 'separation') or 'linear' (with 'd',
    'noise'). Raise :class:`SourceError` for an unknown kind or bad parameters.
    """
    kind = spec.get('kind')
    if kind == 'blobs':
        return BlobsSource(spec.get('d', 2), spec.get('separation', 2.0))
    if kind == 'linear':
        return LinearSource(spec.get('d', 2), spec.get('noise', 0.0), seed)
    raise SourceError(f'unknown synthetic source {kind!r}')

def gen_synthetic(spec, seed):
    """Return a dataset of `spec['m']` examples from the source for `spec`.

    The result is a pure function of `spec` and `seed`.
    """
    seed = as_seed(seed)
    _check('m', spec.get('m', 0), 2)
    return make_source(spec, seed).sample(spec['m'], seed.derive('sample'))
