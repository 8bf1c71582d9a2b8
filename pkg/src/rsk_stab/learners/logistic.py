### SPDX-License-Identifier: GPL-2.0-or-later

"""L2-regularised logistic regression by full-batch gradient descent."""

import logging
from collections import namedtuple

import numpy as np
from scipy.special import expit

from rsk_stab.enforce.value import (
    Boolean,
    Integer,
    Real,
    Constrained,
)
from rsk_stab.enforce.constraint import (
    at_least,
    positive,
)
from rsk_stab.model import ModelledDict
from .learner import (
    Learner,
    algorithm_pair,
    register_learner,
    register_model,
)
from .linear import LinearModel

_logger = logging.getLogger(__name__)

# the step is halved on each rejected step, down to this size
MIN_STEP = 1e-16

LogisticFit = namedtuple('LogisticFit', (
    'coef', 'intercept', 'converged', 'iterations', 'objective',
))

def objective(A, y, weights, lam, coef, intercept): # pylint: disable=invalid-name,too-many-arguments
    """Return the weighted mean cross-entropy plus (`lam`/2)|coef|^2."""
    margins = y * (A @ coef + intercept)
    data_term = weights @ np.logaddexp(0.0, -margins) / weights.sum()
    return float(data_term + 0.5 * lam * (coef @ coef))

def gradient(A, y, weights, lam, coef, intercept): # pylint: disable=invalid-name,too-many-arguments
    """Return the gradient of :func:`objective` as (d_coef, d_intercept)."""
    margins = y * (A @ coef + intercept)
    residual = weights * y * expit(-margins) / weights.sum()
    return (lam * coef - A.T @ residual, -float(residual.sum()))

def gradient_descent(A, y, weights=None, lam=0.0, step=0.1, max_iters=5000, tol=1e-8, intercept=False): # pylint: disable=invalid-name,too-many-arguments,too-many-locals
    """Minimise the logistic :func:`objective` for ±1 labels `y`.

    Start from zero and take steps of size `step` along the negative gradient,
    halving the step whenever a step would increase the objective, until the
    gradient norm is at most `tol` or `max_iters` steps were accepted. The
    intercept is only fitted if `intercept` is set.

    Return a :class:`LogisticFit` whose 'objective' lists the objective after
    each accepted step (non-increasing).
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    weights = np.ones(A.shape[0]) if weights is None else np.asarray(weights)
    coef = np.zeros(A.shape[1])
    bias = 0.0
    value = objective(A, y, weights, lam, coef, bias)
    trace = [value]
    converged = False
    iterations = 0
    while True:
        (d_coef, d_bias) = gradient(A, y, weights, lam, coef, bias)
        if not intercept:
            d_bias = 0.0
        norm = np.sqrt(d_coef @ d_coef + d_bias * d_bias)
        if norm <= tol:
            converged = True
            break
        if iterations >= max_iters or step < MIN_STEP:
            break
        candidate = (coef - step * d_coef, bias - step * d_bias)
        candidate_value = objective(A, y, weights, lam, *candidate)
        if candidate_value <= value:
            (coef, bias) = candidate
            value = candidate_value
            trace.append(value)
            iterations += 1
        else:
            step /= 2
    return LogisticFit(coef, bias, converged, iterations, trace)

@register_model
class LogisticModel(LinearModel):
    """A trained logistic regression model; predictions are log-odds scores."""
    algorithm_tag = 'logistic'
    def __init__(self, task, m, d, coef, intercept=0.0, converged=True, iterations=0): # pylint: disable=too-many-arguments
        super().__init__(task, m, d, coef, intercept)
        self._converged = bool(converged)
        self._iterations = int(iterations)
    @property
    def converged(self):
        """True if gradient descent met its tolerance."""
        return self._converged
    @property
    def iterations(self):
        """The number of accepted gradient steps."""
        return self._iterations
    def probability(self, X): # pylint: disable=invalid-name
        """Return the probability of label +1 at each row of `X`."""
        return expit(self.predict_all(X))
    def params(self):
        params = super().params()
        params.update(converged=self._converged, iterations=self._iterations)
        return params
    @classmethod
    def from_params(cls, task, m, d, params):
        return cls(
            task, m, d, params['coef'], params['intercept'],
            params.get('converged', True), params.get('iterations', 0),
        )

@register_learner
class LogisticSpec(Learner, metaclass=ModelledDict):
    """Binary logistic regression.

    'lambda' >= 0 is the L2 penalty (0 is unregularised). 'step', 'max_iters'
    and 'tol' control gradient descent. Non-convergence is logged as a warning
    and flagged on the model, not raised.
    """
    algorithm_tag = 'logistic'
    tasks = ('binary',)
    weighted = True
    model = {
        'algorithm': algorithm_pair('logistic'),
        'lambda': {
            'value_type': Constrained(Real(), (at_least(0),)),
            'default': 0.01,
        },
        'step': {
            'value_type': Constrained(Real(), (positive(),)),
            'default': 0.1,
        },
        'max_iters': {
            'value_type': Constrained(Integer(), (at_least(1),)),
            'default': 5000,
        },
        'tol': {
            'value_type': Constrained(Real(), (positive(),)),
            'default': 1e-8,
        },
        'intercept': {'value_type': Boolean(), 'default': False},
    }
    def fit(self, data, weights):
        fit = gradient_descent(
            data.X, data.y, weights,
            lam=self['lambda'],
            step=self['step'],
            max_iters=self['max_iters'],
            tol=self['tol'],
            intercept=self['intercept'],
        )
        if not fit.converged:
            _logger.warning(
                'logistic gradient descent stopped after %d steps without '
                'reaching tolerance %g', fit.iterations, self['tol'],
            )
        return LogisticModel(
            data.task, data.m, data.d, fit.coef, fit.intercept,
            fit.converged, fit.iterations,
        )
