### SPDX-License-Identifier: GPL-2.0-or-later

"""Trainable recipes: a learner or a complete ensemble construction.

A recipe is a modelled dict whose 'kind' pair names the construction; the other
pairs are its settings, defaults materialised. Every recipe is a trainer: its
:meth:`train` method returns a trained model from a dataset and a seed, and
all internal resampling is derived from that seed.
"""

from rsk_stab.enforce.value import (
    ValueType,
    Integer,
    Real,
    Enum,
    SequenceOf,
    Constrained,
    optional,
)
from rsk_stab.enforce.constraint import at_least
from rsk_stab.model import ModelledDict
from rsk_stab.core.seed import as_seed
from rsk_stab.learners.learner import LEARNER_SPEC
from .adaboost import adaboost_train
from .bagging import (
    bagging_train,
    subbagging_train,
    train_members,
    bootstrap_replicates,
    subsample_replicates,
)
from .stacking import (
    stacking_train,
    stacked_sampling_train,
)
from .weighted import (
    OBJECTIVE,
    weighted_bagging_fit,
)

RECIPES = {}

COUNT = Constrained(Integer(), (at_least(1),))

def register_recipe(cls):
    """Register recipe class `cls` by its kind."""
    RECIPES[cls.kind_tag] = cls
    return cls

def kind_pair(tag):
    """Return the pair model of the 'kind' pair for `tag`."""
    return {'value_type': Enum((tag,)), 'default': tag}

def resolve_p(p, m):
    """Return subsample size `p`, or ceil(`m`/2) if `p` is None."""
    return (m + 1) // 2 if p is None else p

class Recipe():
    """A mixin for recipe classes, which set :attr:`kind_tag`."""
    kind_tag = None
    @property
    def kind(self):
        """The recipe kind."""
        return self['kind']
    def learners(self):
        """Return the learner specs this recipe trains, bases first."""
        raise NotImplementedError
    def train(self, data, seed):
        """Return the model trained by this recipe on `data` with `seed`."""
        raise NotImplementedError

@register_recipe
class LearnerRecipe(Recipe, metaclass=ModelledDict):
    """A single learner."""
    kind_tag = 'learner'
    model = {
        'kind': kind_pair('learner'),
        'learner': {'value_type': LEARNER_SPEC, 'default': {'algorithm': 'knn'}},
    }
    def learners(self):
        return [self['learner']]
    def train(self, data, seed):
        return self['learner'].train(data, seed)

@register_recipe
class BaggingRecipe(Recipe, metaclass=ModelledDict):
    """Bagging of 'T' members of learner 'base'."""
    kind_tag = 'bagging'
    model = {
        'kind': kind_pair('bagging'),
        'base': {'value_type': LEARNER_SPEC, 'default': {'algorithm': 'knn'}},
        'T': {'value_type': COUNT, 'default': 25},
    }
    def learners(self):
        return [self['base']]
    def train(self, data, seed):
        return bagging_train(self['base'], data, self['T'], seed)

@register_recipe
class SubbaggingRecipe(Recipe, metaclass=ModelledDict):
    """Subbagging of 'T' members on size 'p' subsamples (default ceil(m/2))."""
    kind_tag = 'subbagging'
    model = {
        'kind': kind_pair('subbagging'),
        'base': {'value_type': LEARNER_SPEC, 'default': {'algorithm': 'knn'}},
        'T': {'value_type': COUNT, 'default': 25},
        'p': {'value_type': optional(COUNT), 'default': None},
    }
    def learners(self):
        return [self['base']]
    def train(self, data, seed):
        p = resolve_p(self['p'], data.m)
        return subbagging_train(self['base'], data, self['T'], p, seed)

@register_recipe
class AdaBoostRecipe(Recipe, metaclass=ModelledDict):
    """AdaBoost.M1 with at most 'T' rounds of weak learner 'base'."""
    kind_tag = 'adaboost'
    model = {
        'kind': kind_pair('adaboost'),
        'base': {'value_type': LEARNER_SPEC, 'default': {'algorithm': 'stump'}},
        'T': {'value_type': COUNT, 'default': 10},
    }
    def learners(self):
        return [self['base']]
    def train(self, data, seed):
        return adaboost_train(self['base'], data, self['T'])

SAMPLING = Enum((
    'none',
    'bootstrap',
    'subsample',
))

META_FEATURES = Enum((
    'resubstitution',
    'out-of-fold',
))

@register_recipe
class StackingRecipe(Recipe, metaclass=ModelledDict):
    """Stacking of learners 'bases' under learner 'combiner'.

    'sampling' selects classical stacking ('none'), bag-stacking
    ('bootstrap') or dag-stacking ('subsample', size 'p', default ceil(m/2)).
    """
    kind_tag = 'stacking'
    model = {
        'kind': kind_pair('stacking'),
        'bases': {
            'value_type': SequenceOf(LEARNER_SPEC, length=(1, None)),
            'default': [
                {'algorithm': 'knn', 'k': 1},
                {'algorithm': 'knn', 'k': 3},
                {'algorithm': 'knn', 'k': 5},
            ],
        },
        'combiner': {
            'value_type': LEARNER_SPEC,
            'default': {'algorithm': 'ridge', 'lambda': 1.0},
        },
        'sampling': {'value_type': SAMPLING, 'default': 'none'},
        'p': {'value_type': optional(COUNT), 'default': None},
        'meta_features': {'value_type': META_FEATURES, 'default': 'resubstitution'},
        'folds': {
            'value_type': Constrained(Integer(), (at_least(2),)),
            'default': 5,
        },
    }
    @property
    def T(self): # pylint: disable=invalid-name
        """The number of base learners."""
        return len(self['bases'])
    def learners(self):
        return list(self['bases']) + [self['combiner']]
    def train(self, data, seed):
        if self['sampling'] == 'none':
            return stacking_train(self, data, seed)
        recipe = dict(self, p=resolve_p(self['p'], data.m))
        return stacked_sampling_train(recipe, data, seed)

@register_recipe
class WeightedBaggingRecipe(Recipe, metaclass=ModelledDict):
    """Weighted bagging of 'T' members of learner 'base'.

    Members are trained on bootstrap replicates, or on subsamples of size 'p'
    if 'sampling' is 'subsample'. 'lambda_reg' is the regularisation of theta
    and 'objective' defaults to the objective for the task.
    """
    kind_tag = 'weighted_bagging'
    model = {
        'kind': kind_pair('weighted_bagging'),
        'base': {'value_type': LEARNER_SPEC, 'default': {'algorithm': 'knn'}},
        'T': {'value_type': COUNT, 'default': 25},
        'sampling': {'value_type': Enum(('bootstrap', 'subsample')), 'default': 'bootstrap'},
        'p': {'value_type': optional(COUNT), 'default': None},
        'lambda_reg': {
            'value_type': Constrained(Real(), (at_least(0),)),
            'default': 1e-6,
        },
        'objective': {'value_type': optional(OBJECTIVE), 'default': None},
    }
    def learners(self):
        return [self['base']]
    def train(self, data, seed):
        seed = as_seed(seed)
        if self['sampling'] == 'subsample':
            p = resolve_p(self['p'], data.m)
            replicates = subsample_replicates(data.m, self['T'], p, seed)
        else:
            replicates = bootstrap_replicates(data.m, self['T'], seed)
        members = train_members(self['base'], data, replicates)
        return weighted_bagging_fit(
            members, data,
            lambda_reg=self['lambda_reg'],
            objective=self['objective'],
            replicates=replicates,
        )

class RecipeType(ValueType):
    """A value type forming recipes from dicts, dispatching on 'kind'."""
    def check(self, val):
        return isinstance(val, dict)
    def __call__(self, val):
        if not self.check(val):
            raise TypeError(f'expected a recipe object, got {val!r}')
        try:
            cls = RECIPES[val['kind']]
        except KeyError:
            raise ValueError(
                f'unknown recipe kind {val.get("kind")!r}, expected one of '
                + ', '.join(sorted(RECIPES))
            ) from None
        return val if isinstance(val, cls) else cls(val)
    def describe(self):
        return 'recipe'

RECIPE = RecipeType()

def recipe_from_config(dct):
    """Return the recipe formed from config dict `dct`."""
    return RECIPE(dct)
