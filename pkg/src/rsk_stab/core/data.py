### SPDX-License-Identifier: GPL-2.0-or-later

"""Datasets of examples and their one-example perturbations.

A :class:`Dataset` is an immutable ordered sequence of m examples sharing the
feature dimension d, with a task kind:

* 'regression': real labels

* 'binary': labels in {-1, +1}; :attr:`Dataset.labels` holds the original
  label values in sorted order, the first mapping to -1

* 'multiclass': labels are class indices 0..K-1 into :attr:`Dataset.labels`

.. |DatasetError| replace:: :class:`DatasetError`
"""

import csv
from collections import namedtuple
from math import isfinite

import numpy as np

from rsk_stab.enforce.value import Enum

TASK = Enum((
    'regression',
    'binary',
    'multiclass',
))

Example = namedtuple('Example', ('x', 'y'))

class DatasetError(ValueError):
    """An exception indicating an invalid dataset or dataset operation."""

class EmptyDatasetError(DatasetError):
    """An exception indicating a dataset would have no examples."""

class DatasetIndexError(DatasetError, IndexError):
    """An exception indicating example `index` is outside a size `m` dataset."""
    def __init__(self, index, m):
        super().__init__(f'example index {index} outside [0, {m})')
        self.index = index
        self.m = m

class DimensionError(DatasetError):
    """An exception indicating a feature vector of dimension `got`, not `expected`."""
    def __init__(self, expected, got):
        super().__init__(f'expected dimension {expected}, got {got}')
        self.expected = expected
        self.got = got

class EmptyFileError(DatasetError):
    """An exception indicating CSV file `path` has no header or no rows."""
    def __init__(self, path):
        super().__init__(f'empty file {path}')
        self.path = path

class MissingColumnError(DatasetError):
    """An exception indicating `column` is absent from a CSV header."""
    def __init__(self, column):
        super().__init__(f'label column not found: {column}')
        self.column = column

class NonNumericCellError(DatasetError):
    """An exception indicating a non-numeric or non-finite `cell` at (`row`, `column`).

    `row` counts data rows from 1 (the header is row 0).
    """
    def __init__(self, row, column, cell):
        super().__init__(f'non-numeric cell {cell!r} at row {row}, column {column}')
        self.row = row
        self.column = column
        self.cell = cell

class RaggedRowError(DatasetError):
    """An exception indicating data `row` has the wrong number of cells."""
    def __init__(self, row, expected, got):
        super().__init__(f'row {row} has {got} cells, expected {expected}')
        self.row = row
        self.expected = expected
        self.got = got

class LabelCountError(DatasetError):
    """An exception indicating too many distinct `labels` for a binary task."""
    def __init__(self, labels):
        super().__init__(f'binary task with {len(labels)} distinct labels')
        self.labels = tuple(labels)

def _frozen(arr):
    arr.setflags(write=False)
    return arr

class Dataset():
    """An immutable dataset.

    `X` is an (m, d) array-like of finite reals and `y` a length m array-like of
    labels, already mapped for classification tasks (see module docs). `labels`
    is the declared label set for classification tasks: if omitted it is
    (-1, 1) for 'binary' and range(K) for 'multiclass'.
    """
    def __init__(self, X, y, task='regression', labels=None):
        task = TASK(task)
        X = np.array(X, dtype=float, ndmin=2)
        y = np.array(y, dtype=float).reshape(-1)
        if X.shape[0] == 0 or X.shape[1] == 0:
            raise EmptyDatasetError('a dataset requires m >= 1 and d >= 1')
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise DatasetError(f'features {X.shape} do not match labels {y.shape}')
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DatasetError('features and labels must be finite')
        if task == 'binary':
            if not np.all(np.isin(y, (-1.0, 1.0))):
                raise DatasetError('binary labels must be -1 or +1')
            labels = (-1, 1) if labels is None else labels
        elif task == 'multiclass':
            if np.any(y != np.floor(y)) or np.any(y < 0):
                raise DatasetError('multiclass labels must be class indices')
            if labels is None:
                labels = tuple(range(int(y.max()) + 1))
            if int(y.max()) >= len(labels):
                raise DatasetError('class index outside declared labels')
        else:
            labels = ()
        self._X = _frozen(X)
        self._y = _frozen(y)
        self._task = task
        self._labels = tuple(labels)
    @property
    def X(self): # pylint: disable=invalid-name
        """The read-only (m, d) feature array."""
        return self._X
    @property
    def y(self):
        """The read-only length m label array."""
        return self._y
    @property
    def task(self):
        """The task kind."""
        return self._task
    @property
    def labels(self):
        """The declared label set (empty for regression)."""
        return self._labels
    @property
    def m(self):
        """The number of examples."""
        return self._X.shape[0]
    @property
    def d(self):
        """The feature dimension."""
        return self._X.shape[1]
    @property
    def classes(self):
        """The label values predictions take for a classification task."""
        if self._task == 'binary':
            return (-1.0, 1.0)
        return tuple(float(_) for _ in range(len(self._labels)))
    def __len__(self):
        return self.m
    def __getitem__(self, i):
        self.check_index(i)
        return Example(self._X[i], float(self._y[i]))
    def __iter__(self):
        for i in range(self.m):
            yield Example(self._X[i], float(self._y[i]))
    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self._task == other.task and
            self._labels == other.labels and
            np.array_equal(self._X, other.X) and
            np.array_equal(self._y, other.y)
        )
    def __repr__(self):
        return f'Dataset(m={self.m}, d={self.d}, task={self._task!r})'
    def check_index(self, i):
        """Raise :class:`DatasetIndexError` if `i` is not an example index."""
        if not 0 <= i < self.m:
            raise DatasetIndexError(i, self.m)
    def check_example(self, z):
        """Return `z` as an :class:`Example` compatible with this dataset."""
        x = np.array(z[0], dtype=float).reshape(-1)
        if x.shape[0] != self.d:
            raise DimensionError(self.d, x.shape[0])
        return Example(x, float(z[1]))
    def derive(self, X, y):
        """Return a dataset of this task and label set from `X` and `y`."""
        return Dataset(X, y, self._task, self._labels or None)
    def take(self, indices):
        """Return the dataset of the examples at `indices`, in that order."""
        indices = np.asarray(indices, dtype=np.intp)
        if indices.size == 0:
            raise EmptyDatasetError('no indices')
        return self.derive(self._X[indices], self._y[indices])

def remove_example(data, i):
    """Return `data` without example `i`, the order otherwise preserved.

    Raise :class:`DatasetIndexError` if `i` is out of range and
    :class:`EmptyDatasetError` if `data` has one example.
    """
    data.check_index(i)
    if data.m == 1:
        raise EmptyDatasetError('removing the only example')
    keep = np.delete(np.arange(data.m), i)
    return data.take(keep)

def insert_example(data, i, z):
    """Return `data` with example `z` inserted at position `i`."""
    if not 0 <= i <= data.m:
        raise DatasetIndexError(i, data.m + 1)
    z = data.check_example(z)
    X = np.insert(data.X, i, z.x, axis=0)
    y = np.insert(data.y, i, z.y)
    return data.derive(X, y)

def replace_example(data, i, z):
    """Return `data` with example `i` replaced by `z`."""
    data.check_index(i)
    z = data.check_example(z)
    X = np.array(data.X)
    y = np.array(data.y)
    X[i] = z.x
    y[i] = z.y
    return data.derive(X, y)

def _sorted_labels(values):
    """Return the distinct `values` in sorted order, numerically if possible."""
    distinct = set(values)
    try:
        return tuple(sorted(distinct, key=float))
    except ValueError:
        return tuple(sorted(distinct))

def load_csv(path, label_column='label', task='binary'):
    """Load a dataset from the CSV file at `path`.

    The file is UTF-8 with a mandatory header row. Column `label_column` holds
    the labels; every other column is a finite numeric feature, in header
    order. Blank rows are skipped, but keep their place in the row count. For
    a 'binary' task the distinct labels map to -1 and +1 by sorted order; for a
    'multiclass' task to class indices in sorted order.

    Raise a |DatasetError| naming the offending row or column.
    """
    task = TASK(task)
    with open(path, encoding='utf-8', newline='') as fid:
        rows = list(csv.reader(fid))
    if not rows:
        raise EmptyFileError(path)
    header = rows[0]
    try:
        label_at = header.index(label_column)
    except ValueError:
        raise MissingColumnError(label_column) from None
    features = [j for j in range(len(header)) if j != label_at]
    X = []
    raw = []
    for (row, cells) in enumerate(rows[1:], start=1):
        if not any(_.strip() for _ in cells):
            continue
        if len(cells) != len(header):
            raise RaggedRowError(row, len(header), len(cells))
        vector = []
        for j in features:
            try:
                vector.append(_finite(cells[j]))
            except ValueError:
                raise NonNumericCellError(row, header[j], cells[j]) from None
        X.append(vector)
        raw.append((row, cells[label_at].strip()))
    if not X:
        raise EmptyFileError(path)
    if task == 'regression':
        y = []
        for (row, cell) in raw:
            try:
                y.append(_finite(cell))
            except ValueError:
                raise NonNumericCellError(row, label_column, cell) from None
        return Dataset(X, y, task)
    raw = [cell for (_, cell) in raw]
    labels = _sorted_labels(raw)
    index = dict((label, k) for (k, label) in enumerate(labels))
    if task == 'binary':
        if len(labels) > 2:
            raise LabelCountError(labels)
        y = [2.0 * index[_] - 1.0 for _ in raw]
    else:
        y = [float(index[_]) for _ in raw]
    return Dataset(X, y, task, labels)

def _finite(cell):
    """Return the finite float in `cell`, raising |ValueError| otherwise."""
    val = float(cell)
    if not isfinite(val):
        raise ValueError(cell)
    return val

def label_text(data, y):
    """Return the CSV text of label value `y` of `data`."""
    if data.task == 'regression':
        return repr(float(y))
    if data.task == 'binary':
        return str(data.labels[0 if y < 0 else len(data.labels) - 1])
    return str(data.labels[int(y)])

def write_csv(data, path):
    """Write `data` as CSV to `path`, with header f1..fd,label.

    Floats are written with :func:`repr`, so equal datasets produce identical
    files and loading the file reproduces the features exactly.
    """
    with open(path, 'w', encoding='utf-8', newline='') as fid:
        writer = csv.writer(fid, lineterminator='\n')
        writer.writerow([f'f{j + 1}' for j in range(data.d)] + ['label'])
        for (x, y) in data:
            writer.writerow([repr(float(_)) for _ in x] + [label_text(data, y)])

def holdout_split(data, fraction, seed):
    """Split `data` into disjoint (train, holdout) datasets.

    The holdout takes round(`fraction` * m) examples (at least one) chosen by
    `seed`; both parts keep the original example order. Raise |DatasetError|
    if either part would be empty.
    """
    if not 0 < fraction < 1:
        raise DatasetError(f'holdout fraction {fraction} outside (0, 1)')
    n_holdout = max(1, int(round(fraction * data.m)))
    if n_holdout >= data.m:
        raise EmptyDatasetError(f'no training examples left from m={data.m}')
    order = seed.derive('holdout').generator().permutation(data.m)
    holdout = np.sort(order[:n_holdout])
    train = np.sort(order[n_holdout:])
    return (data.take(train), data.take(holdout))
