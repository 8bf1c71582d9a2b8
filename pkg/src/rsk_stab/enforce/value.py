### SPDX-License-Identifier: GPL-2.0-or-later

"""Enforcement of configuration value types.

A value type is a callable which returns an acceptable (canonical) value from
its input, or raises :class:`TypeError` or :class:`ValueError`.

.. |TypeError| replace:: :class:`TypeError`
.. |ValueError| replace:: :class:`ValueError`
"""

from math import isfinite

class ValueType():
    """A base class for value types.

    A value type restricts the type and value of acceptable values within some
    context, typically a configuration key. Calling a value type with a value
    returns the canonical form of that value.

    :meth:`check` answers the cheaper question of whether the type of a value
    is acceptable; :meth:`__call__` enforces the value itself.
    """
    def check(self, val): # pylint: disable=unused-argument
        """Check if the type of `val` is acceptable for a canonical value.

        Return True if the type of `val`, but not necessarily the value of
        `val`, is acceptable. Return False if the type of `val` is definitely
        not acceptable. Return None to defer the decision to `__call__`.
        """
        return None
    def __call__(self, val):
        """Enforce the canonical values on `val`.

        Return `val` or an equal value if it is acceptable. Raise |TypeError|
        or |ValueError| otherwise.
        """
        if self.check(val):
            return val
        raise TypeError(val)
    def describe(self):
        """Return a short human-readable description of this value type."""
        return self.__class__.__name__.lower()

class Any(ValueType):
    """A value type accepting any value."""
    def check(self, val):
        return True

class Null(ValueType):
    """A value type accepting only None."""
    def check(self, val):
        return val is None
    def __call__(self, val):
        if val is None:
            return val
        raise ValueError(val)

class Boolean(ValueType):
    """A value type accepting boolean values."""
    def check(self, val):
        return isinstance(val, bool)

class Integer(ValueType):
    """A value type accepting integer values (but not booleans)."""
    def check(self, val):
        return isinstance(val, int) and not isinstance(val, bool)

class Real(ValueType):
    """A value type accepting finite real numbers.

    Integers are accepted and returned as floats. NaN and infinities are
    rejected with |ValueError|.
    """
    def check(self, val):
        return isinstance(val, (int, float)) and not isinstance(val, bool)
    def __call__(self, val):
        if not self.check(val):
            raise TypeError(val)
        val = float(val)
        if not isfinite(val):
            raise ValueError(val)
        return val

class String(ValueType):
    """A value type accepting string values."""
    def check(self, val):
        return isinstance(val, str)

class Object(ValueType):
    """A value type accepting dict values, a JSON object of unmodelled pairs."""
    def check(self, val):
        return isinstance(val, dict)

class SequenceOf(ValueType):
    """A value type accepting list or tuple values whose items are of `item`.

    The canonical value is a list of canonical item values. `length` is an
    optional (min, max) pair, where max may be None for no upper bound.
    """
    def __init__(self, item, length=(0, None)):
        super().__init__()
        self._item = item
        self._length = length
    def check(self, val):
        return isinstance(val, (list, tuple))
    def __call__(self, val):
        if not self.check(val):
            raise TypeError(val)
        (min_, max_) = self._length
        if len(val) < min_ or (max_ is not None and max_ < len(val)):
            raise ValueError(f'length {len(val)} outside [{min_}, {max_}]')
        formed = []
        for (idx, item) in enumerate(val):
            try:
                formed.append(self._item(item))
            except (TypeError, ValueError) as err:
                raise err.__class__(f'bad item at #{idx}: {err}') from None
        return formed
    def describe(self):
        return f'sequence of {self._item.describe()}'

class Enum(ValueType):
    """A value type accepting only the values in iterable `accept`."""
    def __init__(self, accept=()):
        super().__init__()
        self._canonical = tuple(accept)
    @property
    def canonical(self):
        """A tuple of the canonical values."""
        return self._canonical
    def check(self, val):
        return any(isinstance(val, cval.__class__) for cval in self.canonical)
    def __call__(self, val):
        if val in self.canonical:
            return val
        raise ValueError(f'{val!r} not one of {", ".join(map(repr, self.canonical))}')
    def describe(self):
        return 'one of ' + ', '.join(map(repr, self.canonical))

class Constrained(ValueType):
    """A value type accepting values of `value_type` passing `constraints`."""
    def __init__(self, value_type, constraints=()):
        super().__init__()
        self._value_type = value_type
        self._constraints = tuple(constraints)
    def check(self, val):
        return self._value_type.check(val)
    def __call__(self, val):
        val = self._value_type(val)
        for constraint in self._constraints:
            if not constraint(val):
                raise ValueError(f'{val!r} not in {constraint}')
        return val
    def describe(self):
        described = [self._value_type.describe()]
        described.extend(str(_) for _ in self._constraints)
        return ' in '.join(described)

class Choice(ValueType):
    """A value type accepting a value of the first fitting `value_types`."""
    def __init__(self, value_types=()):
        super().__init__()
        self._value_types = tuple(value_types)
    def check(self, val):
        return any(value_type.check(val) for value_type in self._value_types)
    def __call__(self, val):
        errors = []
        for value_type in self._value_types:
            try:
                return value_type(val)
            except (TypeError, ValueError) as err:
                errors.append(str(err))
        raise ValueError('; '.join(errors) if errors else val)
    def describe(self):
        return ' or '.join(_.describe() for _ in self._value_types)

def optional(value_type):
    """Return a value type accepting None or a value of `value_type`."""
    return Choice((Null(), value_type))
