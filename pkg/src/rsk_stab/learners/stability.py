### SPDX-License-Identifier: GPL-2.0-or-later

"""Known hypothesis stabilities of learners.

k-NN has hypothesis stability k/m with respect to the classification loss and
ridge regression 1/(lambda m); both are taken as given constants (noted as
'per-paper constant'). A constant predictor ignores its training set, so its
stability is exactly zero for every loss. Other learners have no known
constant.
"""

from collections import namedtuple

from .learner import LEARNER_SPEC

StabilityDescriptor = namedtuple('StabilityDescriptor', (
    'value', 'loss', 'formula', 'notes',
))

PER_PAPER = 'per-paper constant'

def unknown(formula='unknown', notes=()):
    """Return a descriptor of an unknown stability."""
    return StabilityDescriptor(None, None, formula, tuple(notes))

def theoretical_stability(spec, m, kind=None):
    """Return the :class:`StabilityDescriptor` of learner `spec` at size `m`.

    If loss `kind` is given and the known constant applies to another loss,
    the stability is unknown.
    """
    if m < 1:
        raise ValueError(f'training set size must be at least 1, got {m}')
    spec = LEARNER_SPEC(spec)
    if spec.algorithm == 'constant':
        return StabilityDescriptor(0.0, None, '0', ())
    if spec.algorithm == 'knn':
        descriptor = StabilityDescriptor(
            spec['k'] / m, 'classification01', 'k/m', (PER_PAPER,),
        )
    elif spec.algorithm == 'ridge':
        descriptor = StabilityDescriptor(
            1.0 / (spec['lambda'] * m), None, '1/(lambda m)', (PER_PAPER,),
        )
    else:
        return unknown(notes=(f'no known stability for {spec.algorithm}',))
    if kind is not None and descriptor.loss not in (None, kind.kind):
        return unknown(descriptor.formula, (
            f'{descriptor.formula} applies to {descriptor.loss} loss, '
            f'not {kind.kind}',
        ))
    return descriptor
