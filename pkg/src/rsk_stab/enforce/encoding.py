### SPDX-License-Identifier: GPL-2.0-or-later

"""Enforcement of value encoding."""

import json

import numpy as np

class Encoder():
    """A base class for value encoder/decoders.

    :attr:`binary` declares whether encoded values returned by :meth:`encode`
    and accepted by :meth:`decode` are binary or not:
    - a value of True declares binary encoded values of type :class:`bytes`
    - a value of False declares text encoded values of type :class:`str`
    - a value of None declares encoded values of undefined type
    """
    binary = None
    def encode(self, val):
        """Encode `val`."""
        raise NotImplementedError
    def decode(self, val):
        """Decode `val`."""
        raise NotImplementedError

class Json(Encoder):
    """A JSON encoder/decoder.

    `serializers` maps types which :mod:`json` cannot encode to functions
    returning a commonly serializable value. Keyword arguments in `options` are
    passed to every dump, so that one instance always produces one layout.
    """
    binary = False
    def __init__(self, serializers=(), **options):
        super().__init__()
        serializers = dict(serializers)
        def default(self, obj):
            """Return a commonly serializable value from `obj`."""
            for (type_, func) in serializers.items():
                if isinstance(obj, type_):
                    return func(obj)
            return json.JSONEncoder.default(self, obj)
        body = {'default': default}
        self._encode_cls = type('JsonSerializer', (json.JSONEncoder,), body)
        self._options = options
    def encode(self, val):
        return self.dumps(val)
    def decode(self, val):
        return self.loads(val)
    def dumps(self, val):
        """Encode `val` to a JSON-encoded string."""
        return json.dumps(val, cls=self._encode_cls, **self._options)
    def dump(self, val, fid):
        """Encode `val` as a JSON-encoded string to file `fid`."""
        fid.write(self.dumps(val))
        fid.write('\n')
    def loads(self, val): # pylint: disable=no-self-use
        """Decode a value from JSON-encoded string `val`."""
        return json.loads(val)
    def load(self, fid): # pylint: disable=no-self-use
        """Decode a value from a JSON-encoded string in file `fid`."""
        return json.load(fid)

class JsonNumpy(Json):
    """A JSON encoder/decoder for values holding numpy scalars and arrays.

    numpy integers, floats and booleans are encoded as the matching JSON
    primitives; arrays as (nested) lists. Keys are sorted so that equal values
    always encode to identical text.
    """
    def __init__(self, serializers=(), **options):
        options.setdefault('sort_keys', True)
        super().__init__(tuple(serializers) + (
            (np.integer, int),
            (np.floating, float),
            (np.bool_, bool),
            (np.ndarray, lambda arr: arr.tolist()),
        ), **options)
