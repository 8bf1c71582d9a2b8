### SPDX-License-Identifier: GPL-2.0-or-later

"""Stability and generalisation bound calculators.

Every calculator returns a :class:`BoundResult` echoing its inputs. A value of
None means the bound is unknown, because an input stability is unknown.

Inclusion probabilities q of one example in one replicate are selected by
mode. Bootstrap replicates (bag-stacking):

* 'paper': q = 0.632/m (default)

* 'standard': q = 1 - (1 - 1/m)^m

* 'classical': q = 1, no sampling

Subsample replicates of size p (dag-stacking):

* 'paper-example': q = p/m (default)

* 'paper-text': q = 1/p

* 'classical': q = 1, no sampling
"""

import math
from numbers import Integral

from scipy.special import comb
from scipy.stats import binom

from rsk_stab.enforce.value import (
    Any,
    Real,
    String,
    Enum,
    SequenceOf,
    Constrained,
    optional,
)
from rsk_stab.enforce.constraint import at_least
from rsk_stab.model import ModelledDict
from rsk_stab.ensembles.recipes import (
    RECIPE,
    resolve_p,
)
from rsk_stab.learners.stability import theoretical_stability
from .occupancy import occupancy_distribution

# bootstrap inclusion and the 0.632 approximation of distinct examples
BOOTSTRAP_FRACTION = 0.632

# exact occupancy is used up to this m in 'auto' mode
EXACT_OCCUPANCY_MAX = 30

# exact binomial sums are used up to this T
EXACT_TAIL_MAX = 64

BAG_Q_MODE = Enum(('paper', 'standard', 'classical'))
DAG_Q_MODE = Enum(('paper-example', 'paper-text', 'classical'))
OCCUPANCY = Enum(('auto', 'exact', 'approximate'))
GEN_KIND = Enum(('hypothesis', 'pointwise', 'uniform'))
SUBBAGGING_VARIANT = Enum(('loo', 'emp'))
BOUND_TASK = Enum(('regression', 'classification'))

class BoundInputError(ValueError):
    """An exception indicating an invalid bound input `name`."""
    def __init__(self, name, val, reason):
        super().__init__(f'{name} = {val!r}: {reason}')
        self.name = name
        self.val = val

class BoundResult(metaclass=ModelledDict):
    """The value of a bound, its formula, echoed inputs and validity notes.

    'loss' names the loss kind the bound applies to, or is None for any.
    """
    model = {
        'value': {
            'value_type': optional(Constrained(Real(), (at_least(0),))),
            'mandatory': True,
        },
        'formula': {'value_type': String(), 'mandatory': True},
        'inputs': {'value_type': Any(), 'default': {}},
        'notes': {'value_type': SequenceOf(String()), 'default': []},
        'loss': {'value_type': optional(String()), 'default': None},
    }
    @property
    def known(self):
        """True if the bound value is known."""
        return self['value'] is not None

def _nonnegative(name, val):
    if val is None or not val >= 0 or not math.isfinite(val):
        raise BoundInputError(name, val, 'must be finite and nonnegative')
    return float(val)

def _positive(name, val):
    if val is None or not val > 0 or not math.isfinite(val):
        raise BoundInputError(name, val, 'must be finite and positive')
    return float(val)

def _count(name, val, lower=1, upper=None):
    if not isinstance(val, Integral) or val < lower or (upper is not None and val > upper):
        raise BoundInputError(name, val, f'must be an integer in [{lower}, {upper}]')
    return int(val)

def _probability(name, val):
    if not 0 <= val <= 1:
        raise BoundInputError(name, val, 'must be in [0, 1]')
    return float(val)

def _delta(val):
    if not 0 < val < 1:
        raise BoundInputError('delta', val, 'must be in (0, 1)')
    return float(val)

def _mode(value_type, name, val):
    try:
        return value_type(val)
    except ValueError as err:
        raise BoundInputError(name, val, str(err)) from None

def _broadcast(base_betas, T): # pylint: disable=invalid-name
    betas = list(base_betas)
    if len(betas) == 1:
        return betas * T
    if len(betas) != T:
        raise BoundInputError('base_betas', betas, f'need 1 or T={T} values')
    return betas

def unknown(formula, inputs=None, notes=()):
    """Return a :class:`BoundResult` with an unknown value."""
    return BoundResult({
        'value': None,
        'formula': formula,
        'inputs': inputs or {},
        'notes': list(notes),
    })

def stacking_bound(combiner_beta, base_betas):
    """Return the stacking bound: the combiner beta times the base betas."""
    combiner_beta = _nonnegative('combiner_beta', combiner_beta)
    base_betas = [_nonnegative('base_betas', _) for _ in base_betas]
    if not base_betas:
        raise BoundInputError('base_betas', base_betas, 'need at least one')
    return BoundResult({
        'value': combiner_beta * math.prod(base_betas),
        'formula': 'beta(g) * prod_t beta(f_t)',
        'inputs': {'combiner_beta': combiner_beta, 'base_betas': base_betas},
    })

def inclusion_tail(T, s, q): # pylint: disable=invalid-name
    """Return P[N > s] for N ~ Binomial(`T`, `q`).

    Binomial coefficients are exact integers for T <= 64.
    """
    T = _count('T', T)
    s = _count('s', s, 0, T)
    q = _probability('q', q)
    if T > EXACT_TAIL_MAX:
        return float(binom.sf(s, T, q))
    tail = math.fsum(
        comb(T, k, exact=True) * q ** k * (1 - q) ** (T - k)
        for k in range(s + 1, T + 1)
    )
    return min(tail, 1.0)

def bag_inclusion(m, q_mode='paper'):
    """Return the inclusion probability of one example in a size `m` bootstrap."""
    q_mode = _mode(BAG_Q_MODE, 'q_mode', q_mode)
    m = _count('m', m)
    if q_mode == 'paper':
        return min(1.0, BOOTSTRAP_FRACTION / m)
    if q_mode == 'standard':
        return 1 - (1 - 1 / m) ** m
    return 1.0

def dag_inclusion(p, m, q_mode='paper-example'):
    """Return the inclusion probability of one example in a size `p` subsample."""
    q_mode = _mode(DAG_Q_MODE, 'q_mode', q_mode)
    m = _count('m', m)
    p = _count('p', p, 1, m)
    if q_mode == 'paper-example':
        return p / m
    if q_mode == 'paper-text':
        return 1 / p
    return 1.0

def _sampled_stacking(formula, T, q, q_mode, combiner_beta, base_betas, inputs): # pylint: disable=invalid-name,too-many-arguments
    T = _count('T', T)
    stacked = stacking_bound(combiner_beta, _broadcast(base_betas, T))
    tail = inclusion_tail(T, T // 2, q)
    inputs = dict(stacked['inputs'], T=T, q=q, q_mode=q_mode, tail=tail, **inputs)
    return BoundResult({
        'value': tail * stacked['value'],
        'formula': formula,
        'inputs': inputs,
        'notes': [f'q_mode={q_mode}'],
    })

def bag_stacking_bound(T, m, combiner_beta, base_betas, q_mode='paper'): # pylint: disable=invalid-name
    """Return the bag-stacking bound P[N > T/2] times the stacking bound."""
    q = bag_inclusion(m, q_mode)
    return _sampled_stacking(
        'P[N > floor(T/2)] * beta(g) * prod_t beta(f_t)',
        T, q, q_mode, combiner_beta, base_betas, {'m': m},
    )

def dag_stacking_bound(T, p, m, combiner_beta, base_betas, q_mode='paper-example'): # pylint: disable=invalid-name,too-many-arguments
    """Return the dag-stacking bound P[N > T/2] times the stacking bound."""
    q = dag_inclusion(p, m, q_mode)
    return _sampled_stacking(
        'P[N > floor(T/2)] * beta(g) * prod_t beta(f_t)',
        T, q, q_mode, combiner_beta, base_betas, {'m': m, 'p': p},
    )

def _leading(task, B): # pylint: disable=invalid-name
    task = _mode(BOUND_TASK, 'task', task)
    return _positive('B', B) if task == 'regression' else 2.0

def occupancy_sum(gamma_schedule, m, occupancy='auto'):
    """Return (sum_k k gamma_k / m P[d(r) = k], mode used).

    The 'approximate' mode returns 0.632 gamma(0.632 m); 'auto' is exact for
    m <= 30.
    """
    occupancy = _mode(OCCUPANCY, 'occupancy', occupancy)
    m = _count('m', m)
    if occupancy == 'auto':
        occupancy = 'exact' if m <= EXACT_OCCUPANCY_MAX else 'approximate'
    if occupancy == 'approximate':
        gamma = _nonnegative('gamma', gamma_schedule(BOOTSTRAP_FRACTION * m))
        return (BOOTSTRAP_FRACTION * gamma, occupancy)
    distribution = occupancy_distribution(m)
    terms = []
    for (k, probability) in enumerate(distribution, start=1):
        gamma = _nonnegative(f'gamma_{k}', gamma_schedule(k))
        terms.append(k * gamma / m * probability)
    return (math.fsum(terms), occupancy)

def bagging_stability_bound(gamma_schedule, m, B=1.0, task='regression', occupancy='auto'): # pylint: disable=invalid-name
    """Return the bagging hypothesis stability bound.

    `gamma_schedule` maps a number k of distinct training examples to the base
    learner's stability gamma_k. The leading constant is `B` for regression
    and 2 for classification.
    """
    leading = _leading(task, B)
    (total, occupancy) = occupancy_sum(gamma_schedule, m, occupancy)
    return BoundResult({
        'value': leading * total,
        'formula': 'C * sum_k k gamma_k / m P[d(r) = k]',
        'inputs': {'m': m, 'B': B, 'task': task, 'C': leading},
        'notes': [f'occupancy={occupancy}'],
    })

def subbagging_stability_bound(gamma_p, p, m, B=1.0, task='regression'): # pylint: disable=invalid-name
    """Return the subbagging bound C gamma_p p / m (C = `B`, or 2 for classification)."""
    m = _count('m', m)
    p = _count('p', p, 1, m)
    gamma_p = _nonnegative('gamma_p', gamma_p)
    leading = _leading(task, B)
    return BoundResult({
        'value': leading * gamma_p * p / m,
        'formula': 'C * gamma_p * p / m',
        'inputs': {'gamma_p': gamma_p, 'p': p, 'm': m, 'B': B, 'task': task, 'C': leading},
    })

def combiner_on_bagging_bound(combiner_beta, B, inner): # pylint: disable=invalid-name
    """Return the bound of combiner `combiner_beta` over a bagged `inner` bound.

    The inner result keeps its leading constant; the Lipschitz constant `B` is
    applied once, so it multiplies only a classification inner bound (whose
    leading constant is 2).
    """
    combiner_beta = _nonnegative('combiner_beta', combiner_beta)
    B = _positive('B', B) # pylint: disable=invalid-name
    inputs = {'combiner_beta': combiner_beta, 'B': B, 'inner': dict(inner)}
    if not inner.known:
        return unknown('beta(g) * inner', inputs, ['inner bound unknown'])
    factor = B if inner['inputs'].get('task') == 'classification' else 1.0
    return BoundResult({
        'value': factor * combiner_beta * inner['value'],
        'formula': 'B * beta(g) * inner' if factor != 1.0 else 'beta(g) * inner',
        'inputs': inputs,
    })

def _check_gen(observed_error, beta, M, m, delta): # pylint: disable=invalid-name
    M = _positive('M', M) # pylint: disable=invalid-name
    beta = _nonnegative('beta', beta)
    m = _count('m', m)
    delta = _delta(delta)
    observed_error = _nonnegative('observed_error', observed_error)
    if observed_error > M:
        raise BoundInputError('observed_error', observed_error, f'exceeds M = {M}')
    return (observed_error, beta, M, m, delta)

def gen_bound(kind, observed_error, beta, M, m, delta): # pylint: disable=invalid-name,too-many-arguments
    """Return a generalisation bound holding with probability 1 - `delta`.

    * 'hypothesis': R_loo + sqrt((M^2 + 6 M m beta) / (2 m delta))

    * 'pointwise': R_emp + sqrt((M^2 + 12 M m beta) / (2 m delta))

    * 'uniform': R_emp + 2 beta + (4 m beta + M) sqrt(log(1/delta) / (2 m))
    """
    kind = _mode(GEN_KIND, 'kind', kind)
    (observed_error, beta, M, m, delta) = _check_gen(observed_error, beta, M, m, delta) # pylint: disable=invalid-name
    if kind == 'hypothesis':
        value = observed_error + math.sqrt((M * M + 6 * M * m * beta) / (2 * m * delta))
        formula = 'R_loo + sqrt((M^2 + 6 M m beta) / (2 m delta))'
    elif kind == 'pointwise':
        value = observed_error + math.sqrt((M * M + 12 * M * m * beta) / (2 * m * delta))
        formula = 'R_emp + sqrt((M^2 + 12 M m beta) / (2 m delta))'
    else:
        value = (
            observed_error + 2 * beta +
            (4 * m * beta + M) * math.sqrt(math.log(1 / delta) / (2 * m))
        )
        formula = 'R_emp + 2 beta + (4 m beta + M) sqrt(log(1/delta) / (2 m))'
    return BoundResult({
        'value': value,
        'formula': formula,
        'inputs': {
            'kind': kind, 'observed_error': observed_error, 'beta': beta,
            'M': M, 'm': m, 'delta': delta,
        },
    })

def gen_bound_subbagging(variant, observed_error, gamma, p, m, M, B, delta): # pylint: disable=invalid-name,too-many-arguments
    """Return the subbagging bound observed + sqrt((2M^2 + 12 M B p gamma) / (m delta)).

    `variant` 'loo' pairs the leave-one-out error with gamma_p, 'emp' the
    empirical error with the pointwise gamma'_p.
    """
    variant = _mode(SUBBAGGING_VARIANT, 'variant', variant)
    (observed_error, gamma, M, m, delta) = _check_gen(observed_error, gamma, M, m, delta) # pylint: disable=invalid-name
    p = _count('p', p, 1, m)
    B = _positive('B', B) # pylint: disable=invalid-name
    value = observed_error + math.sqrt((2 * M * M + 12 * M * B * p * gamma) / (m * delta))
    return BoundResult({
        'value': value,
        'formula': (
            ('R_loo' if variant == 'loo' else 'R_emp') +
            ' + sqrt((2 M^2 + 12 M B p gamma) / (m delta))'
        ),
        'inputs': {
            'variant': variant, 'observed_error': observed_error,
            'gamma': gamma, 'p': p, 'm': m, 'M': M, 'B': B, 'delta': delta,
        },
    })

def gen_bound_bagging(variant, observed_error, gamma_schedule, m, M, B, delta, occupancy='auto'): # pylint: disable=invalid-name,too-many-arguments
    """Return the bagging form of :func:`gen_bound_subbagging`.

    p gamma_p / m is replaced by the occupancy sum of `gamma_schedule`.
    """
    variant = _mode(SUBBAGGING_VARIANT, 'variant', variant)
    (observed_error, _, M, m, delta) = _check_gen(observed_error, 0.0, M, m, delta) # pylint: disable=invalid-name
    B = _positive('B', B) # pylint: disable=invalid-name
    (total, occupancy) = occupancy_sum(gamma_schedule, m, occupancy)
    value = observed_error + math.sqrt((2 * M * M / m + 12 * M * B * total) / delta)
    return BoundResult({
        'value': value,
        'formula': (
            ('R_loo' if variant == 'loo' else 'R_emp') +
            ' + sqrt((2 M^2 / m + 12 M B sum_k k gamma_k / m P[d(r) = k]) / delta)'
        ),
        'inputs': {
            'variant': variant, 'observed_error': observed_error,
            'occupancy_sum': total, 'm': m, 'M': M, 'B': B, 'delta': delta,
        },
        'notes': [f'occupancy={occupancy}'],
    })

def schedule(spec, kind=None):
    """Return k -> the known stability of learner `spec` at size k, or None.

    Return None if the stability of `spec` is unknown.
    """
    if theoretical_stability(spec, 1, kind).value is None:
        return None
    return lambda k: theoretical_stability(spec, k, kind).value

def _bound_task(kind):
    return 'classification' if kind is not None and kind.classification else 'regression'

def _learner_bound(spec, m, kind):
    descriptor = theoretical_stability(spec, m, kind)
    return BoundResult({
        'value': descriptor.value,
        'formula': descriptor.formula,
        'inputs': {'algorithm': spec.algorithm, 'm': m},
        'notes': list(descriptor.notes),
        'loss': descriptor.loss,
    })

def recipe_bound(recipe, m, kind=None, B=1.0, bag_q_mode='paper', dag_q_mode='paper-example', occupancy='auto'): # pylint: disable=invalid-name,too-many-arguments,too-many-return-statements
    """Return the hypothesis stability bound of `recipe` at training size `m`.

    The bound is built from the known stabilities of the recipe's learners; it
    is unknown if any is unknown or the construction has no known bound.
    """
    recipe = RECIPE(recipe)
    m = _count('m', m)
    loss = None if kind is None else kind.kind
    if recipe.kind == 'learner':
        return _learner_bound(recipe['learner'], m, kind)
    if recipe.kind == 'bagging':
        gammas = schedule(recipe['base'], kind)
        if gammas is None:
            return unknown('bagging', {'m': m}, ['base stability unknown'])
        result = bagging_stability_bound(gammas, m, B, _bound_task(kind), occupancy)
    elif recipe.kind == 'subbagging':
        p = resolve_p(recipe['p'], m)
        gamma_p = theoretical_stability(recipe['base'], p, kind).value
        if gamma_p is None:
            return unknown('subbagging', {'m': m, 'p': p}, ['base stability unknown'])
        result = subbagging_stability_bound(gamma_p, p, m, B, _bound_task(kind))
    elif recipe.kind == 'stacking':
        combiner_beta = theoretical_stability(recipe['combiner'], m, kind).value
        base_betas = [theoretical_stability(_, m, kind).value for _ in recipe['bases']]
        if combiner_beta is None or None in base_betas:
            return unknown('stacking', {'m': m}, ['a learner stability is unknown'])
        if recipe['sampling'] == 'bootstrap':
            result = bag_stacking_bound(recipe.T, m, combiner_beta, base_betas, bag_q_mode)
        elif recipe['sampling'] == 'subsample':
            p = resolve_p(recipe['p'], m)
            result = dag_stacking_bound(recipe.T, p, m, combiner_beta, base_betas, dag_q_mode)
        else:
            result = stacking_bound(combiner_beta, base_betas)
    else:
        return unknown(recipe.kind, {'m': m}, [f'no known stability bound for {recipe.kind}'])
    result['loss'] = loss
    return result
