### SPDX-License-Identifier: GPL-2.0-or-later

"""An ordered map over a thread pool.

Work items run on a joblib thread pool; results always come back in item
order, so reductions over them do not depend on scheduling. The worker count
is `threads` if given, otherwise the active :func:`joblib.parallel_config`
(one worker unless configured, e.g. by the command-line tool).
"""

from joblib import (
    Parallel,
    delayed,
    parallel_config,
)

class TrainingError(RuntimeError):
    """An exception indicating a failure to train.

    `context` names the unit of work which failed ('member', 'fold', 'trial')
    and `index` its position, when known. The cause is chained.
    """
    def __init__(self, message, context=None, index=None):
        super().__init__(message)
        self.context = context
        self.index = index

def _guarded(func, context):
    def call(pair):
        (index, item) = pair
        try:
            return func(item)
        except Exception as err: # pylint: disable=broad-except
            raise TrainingError(
                f'{context} {index} failed: {err}', context, index,
            ) from err
    return call

def ordered_map(func, items, threads=None, context=None):
    """Return the list [func(item) for item in items], computed in parallel.

    If `context` is given, an exception raised by `func` is re-raised as a
    :class:`TrainingError` carrying `context` and the item's position.
    """
    items = list(items)
    if context is not None:
        func = _guarded(func, context)
        items = list(enumerate(items))
    if threads == 1 or len(items) <= 1:
        return [func(item) for item in items]
    options = {'prefer': 'threads'}
    if threads is not None:
        options['n_jobs'] = threads
    return Parallel(**options)(delayed(func)(item) for item in items)

def thread_limit(threads):
    """Return a context manager capping ordered maps at `threads` workers."""
    return parallel_config(backend='threading', n_jobs=threads)
