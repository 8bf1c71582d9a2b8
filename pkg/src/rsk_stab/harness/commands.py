### SPDX-License-Identifier: GPL-2.0-or-later

"""The subcommands of the rsk-stab tool.

Each command takes a validated :class:`ExperimentConfig
<rsk_stab.harness.config.ExperimentConfig>` and returns a :class:`Report
<rsk_stab.harness.report.Report>`. A :class:`ConfigError` is a configuration
which is well formed but unusable by the command; any other failure is a
runtime failure.
"""

import logging
import time
from contextlib import contextmanager
from inspect import signature

import numpy as np

from rsk_stab.core.data import (
    load_csv,
    holdout_split,
)
from rsk_stab.core.losses import (
    LossKind,
    loss_curve,
)
from rsk_stab.core.risk import (
    empirical_error,
    loo_error,
    holdout_risk,
    observed_bound,
)
from rsk_stab.core.seed import as_seed
from rsk_stab.core.synthetic import make_source
from rsk_stab.learners.learner import LEARNER_SPEC
from rsk_stab.learners.stability import theoretical_stability
from rsk_stab.ensembles.ensemble import EnsembleModel
from rsk_stab.ensembles.recipes import (
    StackingRecipe,
    resolve_p,
)
from rsk_stab.ensembles.weighted import weighted_bagging_fit
from rsk_stab.stability.bounds import (
    BoundInputError,
    BoundResult,
    stacking_bound,
    bag_stacking_bound,
    dag_stacking_bound,
    bagging_stability_bound,
    subbagging_stability_bound,
    combiner_on_bagging_bound,
    inclusion_tail,
    gen_bound,
    gen_bound_subbagging,
    gen_bound_bagging,
    schedule,
    recipe_bound,
    unknown,
)
from rsk_stab.stability.empirical import (
    estimate_stability,
    compare_to_bound,
)
from .report import (
    new_report,
    save_model,
)

_logger = logging.getLogger(__name__)

# the perturbation of one weight in the equivalence self-test
SELF_TEST_PERTURBATION = 1e-6

LINEAR_COMBINERS = frozenset(('ridge', 'least_squares', 'logistic'))

class ConfigError(ValueError):
    """An exception indicating a configuration unusable by a command."""

class EquivalenceError(ConfigError):
    """An exception indicating an equivalence check which is not defined."""

class StageError(RuntimeError):
    """An exception indicating the failure of experiment stage `stage`."""
    def __init__(self, stage, err):
        super().__init__(f'stage {stage} failed: {err}')
        self.stage = stage

@contextmanager
def stage(name, timings, annotate=False):
    """Time stage `name` into `timings`.

    If `annotate` is set, runtime failures are re-raised as
    :class:`StageError`; configuration errors pass through.
    """
    start = time.perf_counter()
    _logger.info('stage %s', name)
    try:
        yield
    except (ConfigError, BoundInputError):
        raise
    except Exception as err: # pylint: disable=broad-except
        if not annotate:
            raise
        raise StageError(name, err) from err
    finally:
        timings[name] = time.perf_counter() - start

def load_data(data_config, seed):
    """Return (train, holdout, source) for `data_config` and master `seed`.

    A synthetic training set is the dataset `gen-data` writes for the same
    source and seed; its holdout is a fresh sample. A CSV dataset is split and
    has no source.
    """
    if data_config.synthetic:
        spec = data_config.source_spec()
        source = make_source(spec, seed)
        train = source.sample(spec['m'], seed.derive('sample'))
        holdout = source.sample(data_config['holdout'], seed.derive('holdout'))
        return (train, holdout, source)
    if data_config['path'] is None:
        raise ConfigError('a csv data source requires a path')
    data = load_csv(data_config['path'], data_config['label_column'], data_config.task)
    (train, holdout) = holdout_split(data, data_config['holdout_fraction'], seed)
    return (train, holdout, None)

def describe_data(data_config, train, holdout, source):
    """Return the report description of the loaded data."""
    return {
        'task': train.task,
        'm': train.m,
        'd': train.d,
        'holdout': holdout.m,
        'labels': list(train.labels),
        'source': source.describe() if source is not None else {
            'kind': 'csv', 'path': data_config['path'],
        },
    }

def resolve_loss(config, task, train=None, predictions=None):
    """Return (loss, M origin) for `task`.

    M is configured, fixed at 1 for margin losses, or observed from `train`
    and `predictions` if given.
    """
    loss = config['loss']
    kind = loss['kind'] or ('squared' if task == 'regression' else 'classification01')
    if task == 'regression' and kind in ('classification01', 'gamma'):
        raise ConfigError(f'{kind} loss requires a classification task')
    M = loss['M'] or config['bounds']['M'] # pylint: disable=invalid-name
    resolved = LossKind(kind, loss['gamma'], M)
    if M is not None:
        return (resolved, 'configured')
    if resolved.M is not None:
        return (resolved, 'fixed')
    if predictions is None:
        return (resolved, None)
    return (resolved.with_bound(observed_bound(resolved, train, predictions)), 'observed')

def bound_options(config):
    """Return the recipe bound options of `config`."""
    bounds = config['bounds']
    return {
        'B': bounds['B'],
        'bag_q_mode': bounds['bag_q_mode'],
        'dag_q_mode': bounds['dag_q_mode'],
        'occupancy': bounds['occupancy'],
    }

def _estimate_modes(mode):
    return ('hypothesis', 'pointwise') if mode == 'both' else (mode,)

def estimate(config, source, kind, m, seed):
    """Return (estimates, profile) of the configured recipe on `source`."""
    settings = config['stability']
    if settings['policy'] == 'fixed-i' and settings['index'] >= m:
        raise ConfigError(f'stability index {settings["index"]} outside [0, {m})')
    options = {
        'index': settings['index'],
        'scan': settings['scan'],
        'threads': config['threads'],
    }
    seed = seed.derive('stability')
    def run(mode, size):
        return estimate_stability(
            config['recipe'], source, size, kind, settings['trials'],
            settings['policy'], seed, mode,
            **dict(options, index=min(options['index'], size - 1)),
        )
    estimates = [run(mode, m) for mode in _estimate_modes(settings['mode'])]
    profile = [
        run(mode, size)
        for mode in _estimate_modes(settings['mode'])
        for size in settings['profile']
    ]
    for _ in estimates + profile:
        _logger.info(
            '%s stability at m=%d: %.6g +/- %.2g',
            _['mode'], _['m'], _['mean'], _['stderr'],
        )
    return (estimates, profile)

def compare(config, estimates, kind):
    """Return the comparison records of `estimates` against the recipe bound."""
    return [
        compare_to_bound(_, recipe_bound(
            config['recipe'], _['m'], kind, **bound_options(config),
        ))
        for _ in estimates
    ]

def cmd_stability(config):
    """Estimate the configured recipe's stability against its bound."""
    report = new_report('stability', config)
    (timings, results) = (report['timings'], report['results'])
    seed = as_seed(config['seed'])
    with stage('data', timings):
        (train, holdout, source) = load_data(config['data'], seed)
    if source is None:
        raise ConfigError('stability estimation requires a synthetic data source')
    results['data'] = describe_data(config['data'], train, holdout, source)
    (kind, _) = resolve_loss(config, train.task)
    m = config['stability']['m'] or train.m
    with stage('stability', timings):
        (estimates, profile) = estimate(config, source, kind, m, seed)
    results['stability'] = {'estimates': estimates, 'profile': profile}
    with stage('bounds', timings):
        results['bounds'] = {
            'recipe': recipe_bound(config['recipe'], m, kind, **bound_options(config)),
        }
        results['comparisons'] = compare(config, estimates + profile, kind)
    return report

CALCULATORS = {
    'stacking': stacking_bound,
    'bag-stacking': bag_stacking_bound,
    'dag-stacking': dag_stacking_bound,
    'bagging': bagging_stability_bound,
    'subbagging': subbagging_stability_bound,
    'combiner-on-bagging': combiner_on_bagging_bound,
    'inclusion-tail': inclusion_tail,
    'gen': gen_bound,
    'gen-subbagging': gen_bound_subbagging,
    'gen-bagging': gen_bound_bagging,
}

def calculate(call, config, kind):
    """Return the :class:`BoundResult` of bound calculator `call`.

    `call` names the 'bound' and gives its keyword arguments. 'delta', 'B',
    'M', 'occupancy', 'task' and the q modes default to the bounds config.
    The bagging calculators take the base learner 'base' instead of a
    stability schedule; 'combiner-on-bagging' takes its 'inner' bound as a
    nested call.
    """
    args = dict(call)
    name = args.pop('bound')
    func = CALCULATORS[name]
    bounds = config['bounds']
    defaults = {
        'delta': bounds['delta'],
        'B': bounds['B'],
        'occupancy': bounds['occupancy'],
        'task': 'classification' if kind.classification else 'regression',
        'q_mode': bounds['bag_q_mode'] if name == 'bag-stacking' else bounds['dag_q_mode'],
    }
    if bounds['M'] is not None:
        defaults['M'] = bounds['M']
    parameters = signature(func).parameters
    for (key, val) in defaults.items():
        if key in parameters:
            args.setdefault(key, val)
    if name in ('bagging', 'gen-bagging'):
        try:
            gammas = schedule(LEARNER_SPEC(args.pop('base')), kind)
        except KeyError:
            raise ConfigError(f'calculator {name} requires a base learner') from None
        if gammas is None:
            return unknown(name, {'base': call['base']}, ['base stability unknown'])
        args['gamma_schedule'] = gammas
    if name == 'combiner-on-bagging':
        args['inner'] = calculate(args.get('inner', {'bound': 'bagging'}), config, kind)
    try:
        result = func(**args)
    except TypeError as err:
        raise ConfigError(f'calculator {name}: {err}') from None
    if name == 'inclusion-tail':
        return BoundResult({
            'value': result,
            'formula': 'P[N > s], N ~ Binomial(T, q)',
            'inputs': args,
        })
    return result

def cmd_bounds(config):
    """Evaluate the configured recipe's stability bound and any calculators.

    Nothing is trained.
    """
    report = new_report('bounds', config)
    (timings, results) = (report['timings'], report['results'])
    data_config = config['data']
    if data_config.synthetic:
        (task, m) = (data_config.task, data_config['m'])
    else:
        with stage('data', timings):
            (train, _, _) = load_data(data_config, as_seed(config['seed']))
        (task, m) = (train.task, train.m)
    (kind, _) = resolve_loss(config, task)
    with stage('bounds', timings):
        results['bounds'] = {
            'recipe': recipe_bound(config['recipe'], m, kind, **bound_options(config)),
            'calculators': [
                {'bound': _['bound'], 'result': calculate(_, config, kind)}
                for _ in config['bounds']['calculators']
            ],
        }
    return report

def combiner_mapping(combiner, m):
    """Return (lambda_reg, objective, options) matching linear `combiner`.

    Weighted bagging with these settings fits the weights the combiner fits
    on `m` examples.
    """
    if combiner.algorithm == 'least_squares':
        return (0.0, 'squared', {})
    if combiner.algorithm == 'ridge':
        return (combiner['lambda'] * m, 'squared', {})
    options = dict((_, combiner[_]) for _ in ('step', 'max_iters', 'tol'))
    return (combiner['lambda'] * m, 'cross-entropy', options)

def probe_points(data, n, seed):
    """Return `n` points drawn uniformly from the bounding box of `data`."""
    (lower, upper) = (data.X.min(axis=0), data.X.max(axis=0))
    return seed.generator().uniform(lower, upper, size=(n, data.d))

def check_equivalence(config, train, seed):
    """Return the equivalence record of bag-stacking and weighted bagging.

    Both are built from the same trained members. Raise
    :class:`EquivalenceError` if the check is not defined for the config.
    """
    settings = config['equivalence']
    combiner = settings['combiner']
    if combiner.algorithm not in LINEAR_COMBINERS:
        raise EquivalenceError(
            f'equivalence only defined for linear combiner, got {combiner.algorithm}'
        )
    if combiner['intercept']:
        raise EquivalenceError('equivalence only defined for a combiner without intercept')
    if train.task not in combiner.tasks:
        raise EquivalenceError(f'{combiner.algorithm} combiner cannot learn {train.task}')
    recipe = StackingRecipe({
        'bases': [settings['base']] * settings['T'],
        'combiner': combiner,
        'sampling': settings['sampling'],
        'p': settings['p'],
    })
    stacked = recipe.train(train, seed.derive('members'))
    (lambda_reg, objective, options) = combiner_mapping(combiner, train.m)
    weighted = weighted_bagging_fit(
        stacked.members, train,
        lambda_reg=lambda_reg,
        objective=objective,
        replicates=stacked.member_indices,
        **options,
    )
    theta = np.array(weighted.weights)
    if settings['self_test']:
        theta[0] += SELF_TEST_PERTURBATION
        weighted = EnsembleModel(
            train.task, train.m, weighted.members, 'weighted',
            weighted.member_indices, theta,
        )
    probes = probe_points(train, settings['probes'], seed.derive('probes'))
    theta_residual = float(np.max(np.abs(stacked.combiner.coef - theta)))
    prediction_residual = float(np.max(np.abs(
        stacked.score_all(probes) - weighted.score_all(probes)
    )))
    passed = max(theta_residual, prediction_residual) <= settings['tolerance']
    return {
        'T': settings['T'],
        'combiner': combiner.algorithm,
        'lambda_reg': lambda_reg,
        'objective': objective,
        'theta': theta.tolist(),
        'theta_residual': theta_residual,
        'prediction_residual': prediction_residual,
        'probes': settings['probes'],
        'tolerance': settings['tolerance'],
        'self_test': settings['self_test'],
        'pass': passed,
        'ok': passed != settings['self_test'],
    }

def cmd_equivalence(config):
    """Check that bag-stacking with a linear combiner equals weighted bagging."""
    report = new_report('equivalence', config)
    (timings, results) = (report['timings'], report['results'])
    seed = as_seed(config['seed'])
    with stage('data', timings):
        (train, holdout, source) = load_data(config['data'], seed)
    results['data'] = describe_data(config['data'], train, holdout, source)
    with stage('equivalence', timings):
        record = check_equivalence(config, train, seed.derive('equivalence'))
    _logger.info(
        'equivalence %s: theta residual %.3g, prediction residual %.3g',
        'pass' if record['pass'] else 'fail',
        record['theta_residual'], record['prediction_residual'],
    )
    results['equivalence'] = record
    return report

def generalisation(config, train, kind, errors, beta):
    """Return the generalisation bound records of a trained recipe.

    `errors` holds its observed errors and `beta` is its stability bound,
    also taken as its pointwise hypothesis stability. Each record pairs a
    bound with the holdout risk and whether the risk lies below the bound.
    """
    recipe = config['recipe']
    bounds = config['bounds']
    (m, delta) = (train.m, bounds['delta'])
    calls = []
    if beta.known:
        if errors['loo'] is not None:
            calls.append(('hypothesis', lambda: gen_bound(
                'hypothesis', errors['loo'], beta['value'], kind.M, m, delta,
            )))
        calls.append(('pointwise', lambda: gen_bound(
            'pointwise', errors['empirical'], beta['value'], kind.M, m, delta,
        )))
    if recipe.kind == 'subbagging' and errors['loo'] is not None:
        p = resolve_p(recipe['p'], m)
        gamma_p = theoretical_stability(recipe['base'], p, kind).value
        if gamma_p is not None:
            calls.append(('subbagging', lambda: gen_bound_subbagging(
                'loo', errors['loo'], gamma_p, p, m, kind.M, bounds['B'], delta,
            )))
    if recipe.kind == 'bagging' and errors['loo'] is not None:
        gammas = schedule(recipe['base'], kind)
        if gammas is not None:
            calls.append(('bagging', lambda: gen_bound_bagging(
                'loo', errors['loo'], gammas, m, kind.M, bounds['B'], delta,
                bounds['occupancy'],
            )))
    records = []
    for (name, call) in calls:
        try:
            result = call()
        except BoundInputError as err:
            _logger.warning('%s generalisation bound unknown: %s', name, err)
            result = unknown(name, {'m': m}, [str(err)])
        records.append({
            'bound': name,
            'result': result,
            'holdout_risk': errors['holdout']['mean'],
            'holds': (
                None if result['value'] is None else
                errors['holdout']['mean'] <= result['value']
            ),
        })
    return records

def loss_curves(kind, margins):
    """Return the loss curves of every loss kind over `margins`."""
    kinds = [
        LossKind('classification01'),
        LossKind('gamma', kind.gamma or 1.0),
        LossKind('squared'),
        LossKind('absolute'),
    ]
    return [loss_curve(_, margins) for _ in kinds]

def cmd_experiment(config, model_path=None): # pylint: disable=too-many-locals
    """Run the complete pipeline of an experiment.

    The recipe is trained, its errors measured and its stability estimated,
    then its stability and generalisation bounds are evaluated.

    If `model_path` is given, the trained model is saved there. A runtime
    failure raises :class:`StageError` naming the stage.
    """
    report = new_report('experiment', config)
    (timings, results) = (report['timings'], report['results'])
    seed = as_seed(config['seed'])
    recipe = config['recipe']
    with stage('data', timings, True):
        (train, holdout, source) = load_data(config['data'], seed)
    results['data'] = describe_data(config['data'], train, holdout, source)
    with stage('train', timings, True):
        model = recipe.train(train, seed.derive('model'))
        if model_path is not None:
            save_model(model, model_path)
    with stage('loss', timings, True):
        predictions = np.concatenate((model.score_all(train.X), model.score_all(holdout.X)))
        (kind, origin) = resolve_loss(config, train.task, train, predictions)
    with stage('errors', timings, True):
        risk = holdout_risk(model, holdout, kind)
        errors = {
            'loss': dict(kind.to_dict(), M_origin=origin),
            'empirical': empirical_error(model, train, kind),
            'loo': (
                loo_error(recipe, train, kind, seed, config['threads'])
                if config['experiment']['loo'] else None
            ),
            'holdout': dict(risk._asdict()),
        }
    results['errors'] = errors
    _logger.info(
        'errors: empirical %.4g, holdout %.4g +/- %.2g',
        errors['empirical'], risk.mean, risk.stderr,
    )
    estimates = []
    if config['experiment']['estimate_stability'] and source is not None:
        with stage('stability', timings, True):
            (estimates, profile) = estimate(config, source, kind, train.m, seed)
        results['stability'] = {'estimates': estimates, 'profile': profile}
        estimates = estimates + profile
    with stage('bounds', timings, True):
        beta = recipe_bound(recipe, train.m, kind, **bound_options(config))
        results['bounds'] = {'recipe': beta}
        results['comparisons'] = compare(config, estimates, kind)
    with stage('generalisation', timings, True):
        results['generalisation'] = generalisation(
            config, train, kind, errors, beta,
        )
    results['loss_curves'] = loss_curves(kind, config['experiment']['margins'])
    return report
