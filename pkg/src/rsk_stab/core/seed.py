### SPDX-License-Identifier: GPL-2.0-or-later

"""Deterministic randomness from a master seed.

Every random stream is a pure function of a master seed and a derivation path
of (tag, index) pairs, so that results never depend on the order in which work
is executed. Streams are produced by numpy's counter-based Philox bit generator
keyed through a :class:`numpy.random.SeedSequence` whose spawn key is the
derivation path.
"""

from zlib import crc32

import numpy as np

MASTER_MAX = 2**64 - 1

BIT_GENERATOR = 'Philox'

def tag_key(tag):
    """Return the integer spawn key component for string `tag`."""
    return crc32(tag.encode('utf-8'))

class Seed():
    """A master seed with a derivation path.

    `master` is an unsigned 64-bit integer. `path` is a tuple of integers, two
    per derivation step. Raise :class:`ValueError` if `master` is out of range.
    """
    def __init__(self, master, path=()):
        if isinstance(master, bool) or not isinstance(master, (int, np.integer)):
            raise TypeError(master)
        if not 0 <= master <= MASTER_MAX:
            raise ValueError(f'master seed {master} outside [0, {MASTER_MAX}]')
        self._master = int(master)
        self._path = tuple(int(_) for _ in path)
    @property
    def master(self):
        """The master seed."""
        return self._master
    @property
    def path(self):
        """The derivation path, a tuple of integers."""
        return self._path
    def derive(self, tag, index=0):
        """Return the seed derived from this seed by `tag` and `index`."""
        if index < 0:
            raise ValueError(index)
        return Seed(self._master, self._path + (tag_key(tag), int(index)))
    def generator(self):
        """Return a fresh :class:`numpy.random.Generator` for this seed."""
        sequence = np.random.SeedSequence(self._master, spawn_key=self._path)
        return np.random.Generator(np.random.Philox(sequence))
    def __eq__(self, other):
        if not isinstance(other, Seed):
            return NotImplemented
        return (self._master, self._path) == (other.master, other.path)
    def __hash__(self):
        return hash((self._master, self._path))
    def __repr__(self):
        return f'Seed({self._master}, {self._path})'

def as_seed(val):
    """Return `val` as a :class:`Seed`, wrapping a master seed integer."""
    return val if isinstance(val, Seed) else Seed(val)

def substream(master, tag, index):
    """Return the generator for (`master`, `tag`, `index`)."""
    return as_seed(master).derive(tag, index).generator()

def describe():
    """Return a description of the random number contract for reports."""
    return {
        'bit_generator': BIT_GENERATOR,
        'seeding': 'SeedSequence(master, spawn_key=(crc32(tag), index, ...))',
        'numpy': np.__version__,
    }
