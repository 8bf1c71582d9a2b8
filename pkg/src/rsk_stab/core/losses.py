### SPDX-License-Identifier: GPL-2.0-or-later

"""Loss functions.

Four kinds of loss are provided for a real prediction f(x) of label y:

* 'squared': (y - f(x))^2

* 'absolute': |y - f(x)|

* 'classification01': 1 if sign(f(x)) != y, else 0. A prediction of exactly
  zero is a misclassification for both classes. For a multiclass task the
  prediction is a class index and the loss is 1 if it differs from y.

* 'gamma': 1 if y f(x) < 0, 1 - y f(x) / gamma if 0 <= y f(x) <= gamma, else 0

M is a known upper bound on loss values: 1 for 'classification01' and 'gamma',
user-supplied (or None, not yet known) for 'squared' and 'absolute'.
"""

import numpy as np

from rsk_stab.enforce.value import Enum

KIND = Enum((
    'squared',
    'absolute',
    'classification01',
    'gamma',
))

MARGIN_KINDS = frozenset(('classification01', 'gamma'))

class LossError(ValueError):
    """An exception indicating invalid loss parameters or labels."""

class LossKind():
    """A loss function of `kind` with bound `M`.

    `gamma` is the margin of a 'gamma' loss and must be positive. Raise
    :class:`LossError` for invalid parameters.
    """
    def __init__(self, kind, gamma=None, M=None): # pylint: disable=invalid-name
        try:
            kind = KIND(kind)
        except ValueError as err:
            raise LossError(str(err)) from None
        if kind == 'gamma':
            if gamma is None or not gamma > 0:
                raise LossError(f'gamma loss requires gamma > 0, got {gamma}')
        else:
            gamma = None
        if kind in MARGIN_KINDS:
            M = 1.0 if M is None else M
        if M is not None and not M > 0:
            raise LossError(f'loss bound M must be positive, got {M}')
        self._kind = kind
        self._gamma = None if gamma is None else float(gamma)
        self._M = None if M is None else float(M) # pylint: disable=invalid-name
    @property
    def kind(self):
        """The loss kind."""
        return self._kind
    @property
    def gamma(self):
        """The margin of a 'gamma' loss, otherwise None."""
        return self._gamma
    @property
    def M(self): # pylint: disable=invalid-name
        """The upper bound on loss values, or None if not known."""
        return self._M
    @property
    def classification(self):
        """True if this loss applies only to classification."""
        return self._kind in MARGIN_KINDS
    def with_bound(self, M): # pylint: disable=invalid-name
        """Return this loss with upper bound `M`."""
        return LossKind(self._kind, self._gamma, M)
    def values(self, predictions, y, multiclass=False):
        """Return the array of losses of `predictions` against labels `y`."""
        predictions = np.asarray(predictions, dtype=float)
        y = np.asarray(y, dtype=float)
        if self._kind == 'squared':
            return (y - predictions) ** 2
        if self._kind == 'absolute':
            return np.abs(y - predictions)
        if multiclass:
            if self._kind == 'gamma':
                raise LossError('gamma loss requires a binary task')
            return (predictions != y).astype(float)
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise LossError(f'{self._kind} loss requires labels in {{-1, +1}}')
        return margin_loss(self, y * predictions)
    def __call__(self, prediction, example, multiclass=False):
        return float(self.values([prediction], [example[1]], multiclass)[0])
    def __eq__(self, other):
        if not isinstance(other, LossKind):
            return NotImplemented
        return self.to_dict() == other.to_dict()
    def __hash__(self):
        return hash((self._kind, self._gamma, self._M))
    def __repr__(self):
        return f'LossKind({self._kind!r}, gamma={self._gamma}, M={self._M})'
    def to_dict(self):
        """Return a dict describing this loss."""
        return {'kind': self._kind, 'gamma': self._gamma, 'M': self._M}

def margin_loss(kind, margins):
    """Return the `kind` losses at margins y f(x), for a margin loss `kind`."""
    margins = np.asarray(margins, dtype=float)
    if kind.kind == 'classification01':
        return (margins <= 0).astype(float)
    # gamma
    return np.where(
        margins < 0,
        1.0,
        np.clip(1.0 - margins / kind.gamma, 0.0, 1.0),
    )

def loss(kind, prediction, example, multiclass=False):
    """Return the loss of `kind` for `prediction` on `example`."""
    return kind(prediction, example, multiclass)

def loss_curve(kind, margins):
    """Tabulate the loss of `kind` over `margins` y f(x).

    Squared and absolute losses are tabulated for label y = 1, where the
    margin equals the prediction. Return a dict with 'margins' and 'losses'.
    """
    margins = np.asarray(margins, dtype=float)
    if kind.classification:
        losses = margin_loss(kind, margins)
    else:
        losses = kind.values(margins, np.ones_like(margins))
    return {
        'loss': kind.to_dict(),
        'margins': margins.tolist(),
        'losses': losses.tolist(),
    }
