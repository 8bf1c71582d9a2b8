### SPDX-License-Identifier: GPL-2.0-or-later

"""A tool for ensemble stability experiments.

Exit status is 0 on success, 1 on a runtime failure and 2 on a configuration
or usage error.
"""

from argparse import (
    ArgumentParser,
    ArgumentTypeError,
)
import logging
import sys
from contextlib import nullcontext

from rsk_stab.enforce.encoding import JsonNumpy
from rsk_stab.core.data import (
    DatasetError,
    load_csv,
    write_csv,
)
from rsk_stab.core.losses import LossError
from rsk_stab.core.parallel import thread_limit
from rsk_stab.core.seed import MASTER_MAX
from rsk_stab.core.synthetic import gen_synthetic
from rsk_stab.stability.bounds import BoundInputError
from .config import build_config
from .commands import (
    ConfigError,
    cmd_stability,
    cmd_bounds,
    cmd_equivalence,
    cmd_experiment,
)
from .report import (
    dumps_report,
    save_report,
    load_model,
)

_logger = logging.getLogger(__name__)

JSON = JsonNumpy()

EXIT_RUNTIME = 1
EXIT_USAGE = 2

USAGE_ERRORS = (ConfigError, BoundInputError, LossError)

COMMANDS = {
    'stability': cmd_stability,
    'bounds': cmd_bounds,
    'equivalence': cmd_equivalence,
}

def _integer(lower, upper=None):
    def parse(text):
        try:
            val = int(text)
        except ValueError:
            raise ArgumentTypeError(f'{text!r} is not an integer') from None
        if val < lower or (upper is not None and val > upper):
            raise ArgumentTypeError(f'{val} outside [{lower}, {upper}]')
        return val
    return parse

def _real(lower):
    def parse(text):
        try:
            val = float(text)
        except ValueError:
            raise ArgumentTypeError(f'{text!r} is not a number') from None
        if not val >= lower:
            raise ArgumentTypeError(f'{val} is less than {lower}')
        return val
    return parse

def _common(aparser):
    aparser.add_argument('--seed', type=_integer(0, MASTER_MAX), help=' '.join((
        "the master seed, overriding the configured seed",
    )))
    aparser.add_argument('-o', '--out', help=' '.join((
        "the output file (default: stdout)",
    )))
    aparser.add_argument('--threads', type=_integer(1), help=' '.join((
        "the maximum number of worker threads; results do not depend on it",
    )))
    aparser.add_argument('-v', '--verbose', action='store_true', help=' '.join((
        "log progress at debug level to stderr",
    )))
    aparser.add_argument('-q', '--quiet', action='store_true', help=' '.join((
        "log only warnings and errors to stderr",
    )))

def _configured(aparser):
    _common(aparser)
    aparser.add_argument('-c', '--config', help=' '.join((
        "the JSON experiment config file (default: all defaults)",
    )))
    aparser.add_argument(
        '-s', '--set',
        default=[], action='append', dest='overrides', metavar='PATH=VALUE',
        help=' '.join((
            "override the config value at a dotted path, e.g.",
            "--set stability.trials=100; VALUE is JSON or a plain string",
        )),
    )

def make_parser():
    """Return the argument parser of the tool."""
    aparser = ArgumentParser(description=main.__doc__)
    commands = aparser.add_subparsers(dest='command', required=True)
    gen = commands.add_parser('gen-data', help=' '.join((
        "write a synthetic dataset as CSV: the training set an experiment with",
        "the same source and seed trains on",
    )))
    gen.add_argument('kind', nargs='?', choices=('blobs', 'linear'), help=' '.join((
        "the source kind (default: the configured source)",
    )))
    gen.add_argument('-c', '--config', help=' '.join((
        "the JSON experiment config whose data section is the source;",
        "each flag given overrides it (default: all defaults)",
    )))
    gen.add_argument('--m', type=_integer(2), help=' '.join((
        "the number of examples",
    )))
    gen.add_argument('--d', type=_integer(1), help=' '.join((
        "the feature dimension",
    )))
    gen.add_argument('--sep', type=_real(0), help=' '.join((
        "the distance between blob centres",
    )))
    gen.add_argument('--noise', type=_real(0), help=' '.join((
        "the standard deviation of linear source noise",
    )))
    _common(gen)
    for name in ('stability', 'bounds', 'equivalence'):
        _configured(commands.add_parser(
            name, help=COMMANDS[name].__doc__.splitlines()[0],
        ))
    experiment = commands.add_parser(
        'experiment', help=cmd_experiment.__doc__.splitlines()[0],
    )
    _configured(experiment)
    experiment.add_argument('--save-model', help=' '.join((
        "save the trained model as JSON to this file",
    )))
    predict = commands.add_parser('predict', help=' '.join((
        "apply a saved model to the features of a CSV file",
    )))
    predict.add_argument('model', help="the saved model file")
    predict.add_argument('data', help="the CSV file")
    predict.add_argument('--label-column', default='label', help=' '.join((
        "the label column of the CSV file",
    )))
    _common(predict)
    return aparser

def _logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        stream=sys.stderr, level=level,
        format='%(levelname)s %(name)s: %(message)s',
    )

def _load_raw(path):
    if path is None:
        return {}
    with open(path, encoding='utf-8') as fid:
        return JSON.load(fid)

def _write(text, path):
    with (  open(path, 'w', encoding='utf-8')
            if path is not None else
            nullcontext(sys.stdout)
        ) as fid:
        fid.write(text)
        fid.write('\n')

def gen_data(args):
    """Write the dataset of the `gen-data` arguments `args`.

    The source is the synthetic data section of the config, with each given
    flag overriding it.
    """
    if args.out is None:
        raise ConfigError('gen-data requires --out')
    try:
        config = build_config(_load_raw(args.config), seed=args.seed)
    except (TypeError, ValueError) as err:
        raise ConfigError(f'bad config: {err}') from err
    spec = config['data'].source_spec()
    flags = {
        'kind': args.kind, 'm': args.m, 'd': args.d,
        'separation': args.sep, 'noise': args.noise,
    }
    spec.update((key, val) for (key, val) in flags.items() if val is not None)
    if spec['kind'] == 'csv':
        raise ConfigError('gen-data requires a synthetic source')
    data = gen_synthetic(spec, config['seed'])
    write_csv(data, args.out)
    print(args.out)

def predict(args):
    """Write the predictions of a saved model on a CSV file."""
    model = load_model(args.model)
    data = load_csv(args.data, args.label_column, model.task)
    _write(JSON.dumps({
        'format': 'rsk-stab/predictions/1',
        'algorithm': model.algorithm,
        'predictions': model.predict_all(data.X),
    }), args.out)

def run(args):
    """Run the configured command of parsed `args`; return the report."""
    try:
        config = build_config(_load_raw(args.config), args.overrides, args.seed)
    except (TypeError, ValueError) as err:
        raise ConfigError(f'bad config: {err}') from err
    if args.threads is not None:
        config['threads'] = args.threads
    with thread_limit(config['threads']):
        if args.command == 'experiment':
            report = cmd_experiment(config, args.save_model)
        else:
            report = COMMANDS[args.command](config)
    if args.out is None:
        _write(dumps_report(report), None)
    else:
        save_report(report, args.out)
    return report

def main(argv=None):
    """Run ensemble stability experiments and report the results as JSON.

    Reports are written to stdout, or to the file named by --out; progress and
    a human summary are logged to stderr.
    """
    args = make_parser().parse_args(argv)
    _logging(args)
    try:
        if args.command == 'gen-data':
            gen_data(args)
            return 0
        if args.command == 'predict':
            predict(args)
            return 0
        report = run(args)
    except (*USAGE_ERRORS, DatasetError, OSError) as err:
        _logger.error('%s', err)
        return EXIT_USAGE
    except Exception as err: # pylint: disable=broad-except
        _logger.error('%s', err)
        return EXIT_RUNTIME
    equivalence = report['results']['equivalence']
    if equivalence and not equivalence['ok']:
        _logger.error('equivalence check failed')
        return EXIT_RUNTIME
    return 0

if __name__ == '__main__':
    sys.exit(main())
