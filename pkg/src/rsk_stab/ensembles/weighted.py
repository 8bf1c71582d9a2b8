### SPDX-License-Identifier: GPL-2.0-or-later

"""Weighted bagging: trained members aggregated by learned weights theta.

For the squared objective theta solves the T x T normal equations

    (F^T F + lambda_reg I) theta = F^T y

where F holds the members' outputs at the training points. For the
cross-entropy objective (binary tasks) theta minimises the mean cross-entropy
of sigmoid(F theta) plus (lambda_reg / 2m) |theta|^2 by gradient descent.

Bag-stacking with a linear combiner without intercept fits exactly the same
theta: a ridge combiner with penalty lambda is weighted bagging with
lambda_reg = lambda m (least squares: lambda_reg = 0) and a logistic combiner
with penalty lambda uses the cross-entropy objective with the same mapping.
"""

from rsk_stab.enforce.value import Enum
from rsk_stab.learners.linear import solve_normal_equations
from rsk_stab.learners.logistic import gradient_descent
from .ensemble import (
    EnsembleModel,
    meta_features,
)

OBJECTIVE = Enum((
    'squared',
    'cross-entropy',
))

def default_objective(task):
    """Return the weighted bagging objective for `task`."""
    return 'squared' if task == 'regression' else 'cross-entropy'

def fit_theta(features, data, lambda_reg=0.0, objective=None, **options):
    """Return theta fitted to (m, T) member `features` and the labels of `data`.

    `options` are passed to the gradient descent of the cross-entropy
    objective. Raise :class:`SingularSystemError
    <rsk_stab.learners.linear.SingularSystemError>` if the squared objective
    is singular.
    """
    if lambda_reg < 0:
        raise ValueError(f'lambda_reg must be nonnegative, got {lambda_reg}')
    objective = OBJECTIVE(objective or default_objective(data.task))
    if objective == 'squared':
        return solve_normal_equations(features, data.y, reg=lambda_reg)
    if data.task != 'binary':
        raise ValueError('the cross-entropy objective requires a binary task')
    fit = gradient_descent(features, data.y, lam=lambda_reg / data.m, **options)
    return fit.coef

def weighted_bagging_fit(members, data, task=None, lambda_reg=0.0, objective=None, replicates=None, **options): # pylint: disable=too-many-arguments
    """Return the weighted bagging ensemble of trained `members` on `data`.

    `task` defaults to the task of `data`. `replicates` optionally records
    the resamples the members were trained on.
    """
    members = list(members)
    if not members:
        raise ValueError('weighted bagging requires at least one member')
    if task is not None and task != data.task:
        raise ValueError(f'task {task} does not match data task {data.task}')
    theta = fit_theta(
        meta_features(members, data.X), data, lambda_reg, objective, **options,
    )
    return EnsembleModel(
        data.task, data.m, members, 'weighted', replicates, weights=theta,
    )
