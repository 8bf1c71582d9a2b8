### SPDX-License-Identifier: GPL-2.0-or-later

"""Reports and saved models.

A report is a JSON object with every section always present:

* 'schema': the report schema id, "rsk-stab/report/1"

* 'tool': the tool name and version

* 'command': the subcommand which produced the report

* 'config': the complete echoed configuration

* 'rng': the random number contract and master seed

* 'results': :class:`Results`

* 'timings': wall-clock seconds per stage

Everything but 'timings' is a pure function of the configuration. Reports are
encoded with sorted keys and a fixed indent, so equal reports are identical
text. Loading a report file into :class:`Report` re-validates it.

A saved model is a JSON object {"format": ..., "model": ...} where the format is
"rsk-stab/ensemble/1" for ensembles and "rsk-stab/model/1" otherwise, and the
model is the output of :meth:`TrainedModel.to_dict
<rsk_stab.learners.learner.TrainedModel.to_dict>`.
"""

from importlib.metadata import (
    version,
    PackageNotFoundError,
)

from rsk_stab.enforce.value import (
    Any,
    Boolean,
    Integer,
    Real,
    String,
    Object,
    SequenceOf,
    Enum,
    Constrained,
    Choice,
    optional,
)
from rsk_stab.enforce.constraint import at_least
from rsk_stab.enforce.encoding import JsonNumpy
from rsk_stab.model import ModelledDict
from rsk_stab.core.data import TASK
from rsk_stab.core.losses import KIND
from rsk_stab.core.seed import describe
from rsk_stab.learners.learner import model_from_dict
from rsk_stab.ensembles.weighted import OBJECTIVE
from rsk_stab.stability.bounds import BoundResult
from rsk_stab.stability.empirical import (
    MODE,
    StabilityEstimate,
)

SCHEMA = 'rsk-stab/report/1'
MODEL_FORMAT = 'rsk-stab/model/1'
ENSEMBLE_FORMAT = 'rsk-stab/ensemble/1'

TOOL = 'rsk-stab'

JSON = JsonNumpy(indent=2)

COMMANDS = Enum((
    'stability',
    'bounds',
    'equivalence',
    'experiment',
))

def tool_version():
    """Return the installed version of this package, or 'unknown'."""
    try:
        return version(TOOL)
    except PackageNotFoundError:
        return 'unknown'

EMPTY = Enum(({},))

NONNEGATIVE = Constrained(Real(), (at_least(0),))
COUNT = Constrained(Integer(), (at_least(0),))

M_ORIGIN = Enum(('configured', 'fixed', 'observed'))
STATUS = Enum(('satisfied', 'violated', 'not-applicable'))

def section(cls):
    """Return a value type accepting an empty section or a `cls` section."""
    return Choice((EMPTY, cls.value_type()))

class Tool(metaclass=ModelledDict):
    """The tool which wrote a report."""
    model = {
        'name': {'value_type': String(), 'mandatory': True},
        'version': {'value_type': String(), 'mandatory': True},
    }

class Rng(metaclass=ModelledDict):
    """The random number contract of a report."""
    model = {
        'bit_generator': {'value_type': String(), 'mandatory': True},
        'seeding': {'value_type': String(), 'mandatory': True},
        'numpy': {'value_type': String(), 'mandatory': True},
        'master': {'value_type': COUNT, 'mandatory': True},
    }

class DataSummary(metaclass=ModelledDict):
    """The loaded training data and its source."""
    model = {
        'task': {'value_type': TASK, 'mandatory': True},
        'm': {'value_type': COUNT, 'mandatory': True},
        'd': {'value_type': COUNT, 'mandatory': True},
        'holdout': {'value_type': COUNT, 'mandatory': True},
        'labels': {
            'value_type': SequenceOf(Choice((Integer(), Real(), String()))),
            'mandatory': True,
        },
        'source': {'value_type': Object(), 'mandatory': True},
    }

class LossSummary(metaclass=ModelledDict):
    """A loss kind, with the origin of its bound M when resolved for errors."""
    model = {
        'kind': {'value_type': KIND, 'mandatory': True},
        'gamma': {'value_type': optional(NONNEGATIVE), 'mandatory': True},
        'M': {'value_type': optional(NONNEGATIVE), 'mandatory': True},
        'M_origin': {'value_type': optional(M_ORIGIN)},
    }

class RiskSummary(metaclass=ModelledDict):
    """A holdout risk with its standard error."""
    model = {
        'mean': {'value_type': NONNEGATIVE, 'mandatory': True},
        'stderr': {'value_type': NONNEGATIVE, 'mandatory': True},
        'n': {'value_type': COUNT, 'mandatory': True},
    }

class Errors(metaclass=ModelledDict):
    """The observed errors of a trained recipe."""
    model = {
        'loss': {'value_type': LossSummary.value_type(), 'mandatory': True},
        'empirical': {'value_type': NONNEGATIVE, 'mandatory': True},
        'loo': {'value_type': optional(NONNEGATIVE), 'default': None},
        'holdout': {'value_type': RiskSummary.value_type(), 'mandatory': True},
    }

class Stability(metaclass=ModelledDict):
    """Stability estimates at the configured m and over the m profile."""
    model = {
        'estimates': {
            'value_type': SequenceOf(StabilityEstimate.value_type()),
            'mandatory': True,
        },
        'profile': {
            'value_type': SequenceOf(StabilityEstimate.value_type()),
            'default': [],
        },
    }

class Calculation(metaclass=ModelledDict):
    """The result of one requested bound calculator."""
    model = {
        'bound': {'value_type': String(), 'mandatory': True},
        'result': {'value_type': BoundResult.value_type(), 'mandatory': True},
    }

class Bounds(metaclass=ModelledDict):
    """The recipe's stability bound and any calculator results."""
    model = {
        'recipe': {'value_type': BoundResult.value_type(), 'mandatory': True},
        'calculators': {'value_type': SequenceOf(Calculation.value_type())},
    }

class Comparison(metaclass=ModelledDict):
    """A stability estimate compared against the recipe bound."""
    model = {
        'mode': {'value_type': MODE, 'mandatory': True},
        'm': {'value_type': COUNT, 'mandatory': True},
        'estimate': {'value_type': NONNEGATIVE, 'mandatory': True},
        'stderr': {'value_type': NONNEGATIVE, 'mandatory': True},
        'bound': {'value_type': optional(NONNEGATIVE), 'mandatory': True},
        'formula': {'value_type': String(), 'mandatory': True},
        'status': {'value_type': STATUS, 'mandatory': True},
        'satisfied': {'value_type': optional(Boolean()), 'mandatory': True},
        'slack': {'value_type': optional(Real()), 'mandatory': True},
    }

class Generalisation(metaclass=ModelledDict):
    """A generalisation bound paired with the holdout risk."""
    model = {
        'bound': {'value_type': String(), 'mandatory': True},
        'result': {'value_type': BoundResult.value_type(), 'mandatory': True},
        'holdout_risk': {'value_type': NONNEGATIVE, 'mandatory': True},
        'holds': {'value_type': optional(Boolean()), 'mandatory': True},
    }

class Equivalence(metaclass=ModelledDict):
    """The check that bag-stacking equals weighted bagging."""
    model = {
        'T': {'value_type': Constrained(Integer(), (at_least(1),)), 'mandatory': True},
        'combiner': {'value_type': String(), 'mandatory': True},
        'lambda_reg': {'value_type': NONNEGATIVE, 'mandatory': True},
        'objective': {'value_type': OBJECTIVE, 'mandatory': True},
        'theta': {'value_type': SequenceOf(Real(), length=(1, None)), 'mandatory': True},
        'theta_residual': {'value_type': NONNEGATIVE, 'mandatory': True},
        'prediction_residual': {'value_type': NONNEGATIVE, 'mandatory': True},
        'probes': {'value_type': COUNT, 'mandatory': True},
        'tolerance': {'value_type': NONNEGATIVE, 'mandatory': True},
        'self_test': {'value_type': Boolean(), 'mandatory': True},
        'pass': {'value_type': Boolean(), 'mandatory': True},
        'ok': {'value_type': Boolean(), 'mandatory': True},
    }

class LossCurve(metaclass=ModelledDict):
    """A loss tabulated over margins."""
    model = {
        'loss': {'value_type': LossSummary.value_type(), 'mandatory': True},
        'margins': {'value_type': SequenceOf(Real()), 'mandatory': True},
        'losses': {'value_type': SequenceOf(NONNEGATIVE), 'mandatory': True},
    }

class Results(metaclass=ModelledDict):
    """The results section of a report.

    A section a command does not produce holds its empty default.
    """
    model = {
        'data': {'value_type': section(DataSummary), 'default': {}},
        'errors': {'value_type': section(Errors), 'default': {}},
        'stability': {'value_type': section(Stability), 'default': {}},
        'bounds': {'value_type': section(Bounds), 'default': {}},
        'comparisons': {'value_type': SequenceOf(Comparison.value_type()), 'default': []},
        'generalisation': {
            'value_type': SequenceOf(Generalisation.value_type()),
            'default': [],
        },
        'equivalence': {'value_type': section(Equivalence), 'default': {}},
        'loss_curves': {'value_type': SequenceOf(LossCurve.value_type()), 'default': []},
    }

class Report(metaclass=ModelledDict):
    """A versioned experiment report."""
    model = {
        'schema': {'value_type': Enum((SCHEMA,)), 'default': SCHEMA},
        'tool': {'value_type': Tool.value_type(), 'mandatory': True},
        'command': {'value_type': COMMANDS, 'mandatory': True},
        'config': {'value_type': Object(), 'mandatory': True},
        'rng': {'value_type': Rng.value_type(), 'mandatory': True},
        'results': {'value_type': Results.value_type(), 'default': {}},
        'timings': {'value_type': Object(), 'default': {}},
    }
    def deterministic(self):
        """Return this report without its timings."""
        return dict((k, v) for (k, v) in self.items() if k != 'timings')

def new_report(command, config):
    """Return an empty :class:`Report` of `command` for `config`."""
    return Report({
        'tool': {'name': TOOL, 'version': tool_version()},
        'command': command,
        'config': config,
        'rng': dict(describe(), master=config['seed']),
    })

def dumps_report(report):
    """Return the JSON text of `report`."""
    return JSON.dumps(report)

def save_report(report, path):
    """Write `report` as JSON to `path`."""
    with open(path, 'w', encoding='utf-8') as fid:
        JSON.dump(report, fid)

def load_report(path):
    """Return the :class:`Report` loaded and validated from `path`."""
    with open(path, encoding='utf-8') as fid:
        return Report(JSON.load(fid))

class SavedModel(metaclass=ModelledDict):
    """A saved trained model."""
    model = {
        'format': {'value_type': Enum((MODEL_FORMAT, ENSEMBLE_FORMAT)), 'mandatory': True},
        'model': {'value_type': Any(), 'mandatory': True},
        'tool': {'value_type': String(), 'default': TOOL},
    }

def save_model(model, path):
    """Write trained `model` as JSON to `path`."""
    saved = SavedModel({
        'format': ENSEMBLE_FORMAT if model.algorithm == 'ensemble' else MODEL_FORMAT,
        'model': model.to_dict(),
    })
    with open(path, 'w', encoding='utf-8') as fid:
        JSON.dump(saved, fid)

def load_model(path):
    """Return the trained model saved at `path`.

    Raise :class:`ValueError` if the file is not a saved model.
    """
    with open(path, encoding='utf-8') as fid:
        saved = SavedModel(JSON.load(fid))
    model = model_from_dict(saved['model'])
    if (saved['format'] == ENSEMBLE_FORMAT) != (model.algorithm == 'ensemble'):
        raise ValueError(f'format {saved["format"]} does not match {model.algorithm}')
    return model
