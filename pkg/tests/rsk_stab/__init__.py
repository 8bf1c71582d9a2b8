### SPDX-License-Identifier: GPL-2.0-or-later

"""Common test functions"""

import numpy as np

from rsk_stab.core.data import Dataset

def make_fqname(subject):
    """Return the fully-qualified name of test `subject`."""
    if subject.__class__.__name__ == 'method':
        return '.'.join((
            subject.__self__.__module__,
            subject.__self__.__name__,
            subject.__name__,
        ))
    return '.'.join((
        subject.__module__,
        subject.__name__,
    ))

def make_params_values(values):
    """Return an iterable of values for use with `nose2.params`."""
    # quirk: "To pass a tuple as a simple value, wrap it in another tuple."
    return ((v,) if isinstance(v, tuple) else v for v in values)

def make_params_pairs(arg_values):
    """Return an iterable of pairs for use with `nose2.params`.

    Each element in `arg_values` is expected to be a 2-tuple (`arg`, `values`).
    Pairs are formed by pairing `arg` with each value in `values`.
    """
    return ((a, v) for (a, values) in arg_values for v in values)

def make_values_not_in(values, other):
    """Return a tuple of `values` not in `other`."""
    return tuple(v for v in values if v not in other)

def make_line(m=8):
    """Return a regression dataset on a line, y = 2 x - 1."""
    X = np.arange(m, dtype=float).reshape(-1, 1)
    return Dataset(X, 2 * X[:, 0] - 1, 'regression')

def make_separable(m=8):
    """Return a binary dataset separable at x = (m - 1) / 2 along one axis."""
    X = np.arange(m, dtype=float).reshape(-1, 1)
    y = np.where(X[:, 0] > (m - 1) / 2, 1.0, -1.0)
    return Dataset(X, y, 'binary')

def make_alternating():
    """Return the four point binary dataset labelled +1, -1, -1, +1."""
    return Dataset([[1.0], [2.0], [3.0], [4.0]], [1.0, -1.0, -1.0, 1.0], 'binary')
