### SPDX-License-Identifier: GPL-2.0-or-later

"""Enforcement of value constraints."""

from math import inf

def test_ge(reference):
    """Return a function testing for greater than or equal to `reference`."""
    return lambda val: reference <= val

def test_gt(reference):
    """Return a function testing for strictly greater than `reference`."""
    return lambda val: reference < val

def test_le(reference):
    """Return a function testing for less than or equal to `reference`."""
    return lambda val: val <= reference

def test_lt(reference):
    """Return a function testing for strictly less than `reference`."""
    return lambda val: val < reference

def test_and(constraint_a, constraint_b):
    """Return a function testing for `constraint_a` and `constraint_b`."""
    return lambda val: constraint_a(val) and constraint_b(val)

class Constraint():
    """A(n abstract) base class for value constraints.

    A constraint is a boolean function: values which map to True pass the
    constraint; values which map to False do not.
    """
    def __call__(self, val):
        """Return True if `val` passes this constraint, False otherwise."""
        raise NotImplementedError

class Interval(Constraint):
    """A numeric interval constraint.

    Pass numbers between `lower` and `upper`. Each end is closed unless
    `open_lower` or `open_upper` is set. An infinite end is always open.
    """
    def __init__(self, lower=-inf, upper=inf, open_lower=False, open_upper=False):
        super().__init__()
        if upper < lower:
            raise ValueError((lower, upper))
        self._lower = lower
        self._upper = upper
        self._open = (open_lower or lower == -inf, open_upper or upper == inf)
        self._test = test_and(
            (test_gt if self._open[0] else test_ge)(lower),
            (test_lt if self._open[1] else test_le)(upper),
        )
    def __call__(self, val):
        try:
            return self._test(val)
        except TypeError:
            return False
    def __str__(self):
        return ''.join((
            '(' if self._open[0] else '[',
            f'{self._lower}, {self._upper}',
            ')' if self._open[1] else ']',
        ))

def at_least(lower):
    """Return an :class:`Interval` passing values of at least `lower`."""
    return Interval(lower=lower)

def positive():
    """Return an :class:`Interval` passing strictly positive values."""
    return Interval(lower=0, open_lower=True)

def unit_interval(open_lower=False, open_upper=False):
    """Return an :class:`Interval` over [0, 1], optionally open at either end."""
    return Interval(0, 1, open_lower=open_lower, open_upper=open_upper)
