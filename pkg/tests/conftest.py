"""Run nose2 ``@params`` test methods under pytest.

The suite is written for nose2 (see ``[testenv]`` in setup.cfg).  pytest
does not understand ``nose2.tools.params``, so parameterised methods on
``unittest.TestCase`` classes are expanded here into one method per
argument set, mirroring nose2's own parameters loader plugin.
"""

import functools
import inspect
import unittest

from nose2.plugins.loader.parameters import enumerate_params


def _expand(cls):
    for name, method in list(vars(cls).items()):
        if not name.startswith('test') or not hasattr(method, 'paramList'):
            continue
        for index, argSet in enumerate_params(method.paramList):
            def _method(self, method=method, argSet=argSet):
                return method(self, *argSet)

            _method = functools.update_wrapper(_method, method)
            del _method.paramList
            setattr(cls, f'{name}_{index}', _method)
        delattr(cls, name)


def pytest_pycollect_makeitem(collector, name, obj):
    if inspect.isclass(obj) and issubclass(obj, unittest.TestCase):
        for klass in obj.__mro__:
            if issubclass(klass, unittest.TestCase):
                _expand(klass)
    return None
