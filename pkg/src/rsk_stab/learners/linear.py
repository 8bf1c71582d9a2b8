### SPDX-License-Identifier: GPL-2.0-or-later

"""Linear least-squares learners: ridge regression and ordinary least squares.

Ridge regression with penalty lambda solves the weighted normal equations

    (X^T W X + lambda m I) w = X^T W y

so that its hypothesis stability is 1/(lambda m). With an intercept the
features and labels are first centred on their weighted means and the
intercept is not penalised. Both learners also serve binary classification,
regressing the ±1 labels and returning the real score.
"""

import numpy as np
from scipy.linalg import (
    LinAlgError,
    cho_factor,
    cho_solve,
)

from rsk_stab.enforce.value import (
    Boolean,
    Real,
    Constrained,
)
from rsk_stab.enforce.constraint import positive
from rsk_stab.model import ModelledDict
from .learner import (
    Learner,
    TrainedModel,
    algorithm_pair,
    register_learner,
    register_model,
)

class SingularSystemError(ArithmeticError):
    """An exception indicating singular normal equations.

    `rank` is the rank of the `size` x `size` system.
    """
    def __init__(self, rank, size):
        super().__init__(
            f'singular normal equations (rank {rank} < {size}); '
            'use a positive regularisation'
        )
        self.rank = rank
        self.size = size

def solve_normal_equations(A, target, weights=None, reg=0.0): # pylint: disable=invalid-name
    """Return theta solving (A^T W A + `reg` I) theta = A^T W target.

    `weights` is the diagonal of W (default ones). Raise
    :class:`SingularSystemError` if the system is singular.
    """
    A = np.asarray(A, dtype=float)
    target = np.asarray(target, dtype=float)
    weights = np.ones(A.shape[0]) if weights is None else np.asarray(weights)
    size = A.shape[1]
    if reg == 0:
        rank = np.linalg.matrix_rank(A[weights > 0])
        if rank < size:
            raise SingularSystemError(rank, size)
    gram = A.T @ (weights[:, None] * A) + reg * np.eye(size)
    moment = A.T @ (weights * target)
    try:
        factor = cho_factor(gram)
    except LinAlgError:
        raise SingularSystemError(np.linalg.matrix_rank(gram), size) from None
    return cho_solve(factor, moment)

def fit_linear(X, y, weights, reg, intercept): # pylint: disable=invalid-name
    """Return (coefficients, intercept) of a weighted ridge fit with `reg`."""
    if not intercept:
        return (solve_normal_equations(X, y, weights, reg), 0.0)
    total = weights.sum()
    x_mean = weights @ X / total
    y_mean = weights @ y / total
    coef = solve_normal_equations(X - x_mean, y - y_mean, weights, reg)
    return (coef, float(y_mean - x_mean @ coef))

class LinearModel(TrainedModel):
    """A trained linear model f(x) = <w, x> + b."""
    def __init__(self, task, m, d, coef, intercept=0.0):
        super().__init__(task, m, d)
        self._coef = np.array(coef, dtype=float).reshape(-1)
        self._coef.setflags(write=False)
        self._intercept = float(intercept)
    @property
    def coef(self):
        """The coefficient vector w."""
        return self._coef
    @property
    def intercept(self):
        """The intercept b."""
        return self._intercept
    def predict_all(self, X):
        return self.check_features(X) @ self._coef + self._intercept
    def params(self):
        return {'coef': self._coef.tolist(), 'intercept': self._intercept}
    @classmethod
    def from_params(cls, task, m, d, params):
        return cls(task, m, d, params['coef'], params['intercept'])

@register_model
class RidgeModel(LinearModel):
    """A trained ridge regression model."""
    algorithm_tag = 'ridge'

@register_model
class LeastSquaresModel(LinearModel):
    """A trained ordinary least-squares model."""
    algorithm_tag = 'least_squares'

@register_learner
class RidgeSpec(Learner, metaclass=ModelledDict):
    """Ridge regression with penalty 'lambda' > 0 and optional 'intercept'."""
    algorithm_tag = 'ridge'
    tasks = ('regression', 'binary')
    weighted = True
    model = {
        'algorithm': algorithm_pair('ridge'),
        'lambda': {
            'value_type': Constrained(Real(), (positive(),)),
            'default': 1.0,
        },
        'intercept': {'value_type': Boolean(), 'default': False},
    }
    def fit(self, data, weights):
        reg = self['lambda'] * data.m
        (coef, intercept) = fit_linear(
            data.X, data.y, weights, reg, self['intercept'],
        )
        return RidgeModel(data.task, data.m, data.d, coef, intercept)

@register_learner
class LeastSquaresSpec(Learner, metaclass=ModelledDict):
    """Unregularised least squares with optional 'intercept'."""
    algorithm_tag = 'least_squares'
    tasks = ('regression', 'binary')
    weighted = True
    model = {
        'algorithm': algorithm_pair('least_squares'),
        'intercept': {'value_type': Boolean(), 'default': False},
    }
    def fit(self, data, weights):
        (coef, intercept) = fit_linear(
            data.X, data.y, weights, 0.0, self['intercept'],
        )
        return LeastSquaresModel(data.task, data.m, data.d, coef, intercept)
