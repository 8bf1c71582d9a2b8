### SPDX-License-Identifier: GPL-2.0-or-later

"""Dict values enforced by a class-specific model and policy.

A model defines acceptable pairs for instances of a modelled dict class: the
value type of each pair, whether it is mandatory and its default value.

A policy specifies how pairs not in the model are treated at initialisation:

* 'must-understand' provides a strict protocol: supplying a pair which is not
  defined in the model is an error.

* 'must-ignore' provides a flexible protocol: pairs which are not defined in
  the model are silently discarded.

Default values are materialised into each instance, so that an instance always
holds a value for every pair in its model which has a default. This makes an
instance a complete echo of the configuration it enforces.

.. |ValueType| replace:: :class:`ValueType <rsk_stab.enforce.value.ValueType>`
.. |TypeError| replace:: :class:`TypeError`
.. |ValueError| replace:: :class:`ValueError`
.. |KeyError| replace:: :class:`KeyError`
"""

from copy import deepcopy

from rsk_stab.enforce.value import (
    ValueType,
    Any,
    Enum,
)

POLICY = Enum((
    'must-understand',
    'must-ignore',
))

class NotDefinedError(Exception):
    """An exception indicating a type model is not yet defined.

    Used to indicate that the type model for `cls` is not yet defined and there
    was an attempt to validate data using `cls` or an instance of `cls`.
    """
    def __init__(self, cls):
        super().__init__(cls)
        self.modelled_cls = cls

class AlreadyDefinedError(Exception):
    """An exception indicating a type model is already defined."""
    def __init__(self, cls):
        super().__init__(cls)
        self.modelled_cls = cls

class DictModel(ValueType):
    """A model codifying enforcement rules for specialised dicts.

    `model_spec` is a dict mapping keys to pair models. A pair model is a dict
    which may specify:

    * 'value_type': a |ValueType| instance for enforcing a pair's value
    (default: an instance of :class:`rsk_stab.enforce.value.Any`)

    * 'mandatory': a boolean indicating whether a value must always be
    supplied for this pair (default: False)

    * 'default': a value to materialise when no value is supplied. The default
    is deep-copied and enforced by 'value_type' before use, so a nested
    modelled dict default of ``{}`` materialises its own defaults.

    `model_spec` may be None, in which case the model must be supplied by
    setting :attr:`model_spec` before use.
    """
    def __init__(self, model_spec, policy_spec):
        super().__init__()
        self._model_spec = None
        self._pair_model = {}
        self._mandatory_pairs = frozenset()
        self._policy_spec = POLICY(policy_spec)
        self.model_spec = model_spec
    @property
    def defined(self):
        """Return True if the model spec is defined. Otherwise return False."""
        return self._model_spec is not None
    @property
    def model_spec(self):
        """Return the model spec if it is defined. Otherwise return None."""
        return dict(self._model_spec) if self.defined else None
    @model_spec.setter
    def model_spec(self, val):
        """Set the model spec from `val` then define the model.

        Raise :class:`AlreadyDefinedError` if the model is already defined. If
        `val` is None do not change the model. Raise |ValueError| if `val` is
        not a dict or a pair model is malformed.
        """
        if self.defined:
            raise AlreadyDefinedError(self.__class__)
        if val is None:
            return
        if not isinstance(val, dict):
            raise ValueError(val)
        pair_model = dict((key, self._to_pair_model(val[key])) for key in val)
        self._pair_model = pair_model
        self._mandatory_pairs = frozenset(
            key for key in pair_model if pair_model[key]['mandatory']
        )
        self._model_spec = val
    @property
    def policy_spec(self):
        """Return the policy spec."""
        return self._policy_spec
    @property
    def mandatory(self):
        """A frozenset of the keys of mandatory pairs."""
        return self._mandatory_pairs
    def __iter__(self):
        """Yield the pair keys in the model spec."""
        yield from self._pair_model
    @staticmethod
    def _to_pair_model(spec):
        """Return a pair model from `spec`."""
        model = {}
        model['value_type'] = spec.get('value_type', Any())
        if not isinstance(model['value_type'], ValueType):
            raise ValueError(model['value_type'])
        model['mandatory'] = bool(spec.get('mandatory', False))
        try:
            model['default'] = spec['default']
        except KeyError:
            # omit 'default' so no value is materialised
            pass
        return model
    def screen_value(self, key, val):
        """Return the value to store at `key` from `val`.

        Raise |KeyError| if there is no model for `key`. Raise |TypeError| or
        |ValueError| if `val` does not conform to the model value type at `key`.
        """
        return self._pair_model[key]['value_type'](val)
    def default_value(self, key):
        """Return a fresh copy of the default value for the pair at `key`.

        Raise |KeyError| if there is no model or no default for `key`.
        """
        return deepcopy(self._pair_model[key]['default'])
    def check(self, val):
        return isinstance(val, dict)
    def __call__(self, val):
        """Enforce this model on `val`, returning a :class:`dict`.

        Raise |TypeError| if `val` is not a dict. Raise |ValueError| if `val`
        has a pair not allowed by the policy, a bad value or a missing mandatory
        value. Raise :class:`NotDefinedError` if the model is not defined.
        """
        if not self.check(val):
            raise TypeError(f'expected an object, got {val!r}')
        if not self.defined:
            raise NotDefinedError(self.__class__)
        formed = {}
        for key in val:
            try:
                formed[key] = self.screen_value(key, val[key])
            except KeyError:
                if self._policy_spec == 'must-understand':
                    raise ValueError(f'unknown key {key}') from None
                # else self._policy_spec == 'must-ignore' => discard
            except (TypeError, ValueError) as err:
                reason = f'bad value for {key}: {err}'
                raise err.__class__(reason) from None
        missing = self.mandatory - formed.keys()
        if missing:
            raise ValueError(f'missing values at {", ".join(sorted(missing))}')
        for key in self._pair_model:
            if key in formed:
                continue
            try:
                default = self.default_value(key)
            except KeyError:
                continue
            try:
                formed[key] = self.screen_value(key, default)
            except (TypeError, ValueError) as err:
                raise err.__class__(f'bad default for {key}: {err}') from None
        return formed

class ModelledValue(ValueType):
    """A |ValueType| forming instances of modelled dict class `cls`."""
    def __init__(self, cls):
        super().__init__()
        self._cls = cls
    def check(self, val):
        return isinstance(val, dict)
    def __call__(self, val):
        return self._cls(val)
    def describe(self):
        return self._cls.__name__

def _modelled_define(cls, model_spec):
    """Define the type model for `cls` from `model_spec`."""
    try:
        cls.model.model_spec = model_spec
    except AlreadyDefinedError as err:
        raise AlreadyDefinedError(cls) from err
    return cls

def _modelled_value_type(cls):
    """Return a |ValueType| forming instances of `cls`."""
    return ModelledValue(cls)

def _modelled_init(body):
    """Make a function for use as __init__ of a specialised dict type."""
    def init(self, val=None):
        """Initialise `self`, a specialised dict instance, from `val`."""
        try:
            val = self.model({} if val is None else val)
        except NotDefinedError as err:
            raise NotDefinedError(self.__class__) from err
        dict.__init__(self, val)
        if '__init__' in body:
            # class-specific initialisation
            body['__init__'](self)
    return init

def _modelled_setitem(self, key, val):
    """Set the value at `key` in specialised dict `self` from `val`."""
    try:
        val = self.model.screen_value(key, val)
    except KeyError:
        raise KeyError(f'unknown key {key}') from None
    dict.__setitem__(self, key, val)

def _modelled_delitem(self, key):
    """Delete the value at `key`, unless the pair is mandatory."""
    if key in self.model.mandatory:
        raise KeyError(key)
    dict.__delitem__(self, key)

class ModelledDict(type):
    """A metaclass for constructing specialised dict classes.

    Each instance of a specialised dict class is still a :class:`dict`, so it
    may be mixed with native Python values and JSON-encoded without custom
    encoding. The specialised class may define its own methods to provide a
    semantic layer above the dict store.

    A class using this metaclass sets a 'model' class attribute (see
    :class:`DictModel`) and may set a 'policy' class attribute (default
    'must-understand'). A class without a 'model' is a forward declaration
    whose model is set later with the class's 'define' method.

    Setting an item enforces the pair model (unknown keys raise |KeyError|,
    bad values |TypeError| or |ValueError|); deleting a mandatory pair raises
    |KeyError|. Other dict methods are not specialised.

    Each class also provides 'value_type', a class method returning a
    |ValueType| which forms instances of the class: use it to nest one modelled
    dict inside another's model.
    """
    def __new__(cls, name, bases, dct):
        obases = [_ for _ in bases if _ is not dict]
        obases.insert(0, dict)
        bases = tuple(obases)
        try:
            model_spec = dict(dct['model'])
        except KeyError:
            # forward declaration: define() before use
            model_spec = None
        policy_spec = dct.get('policy', 'must-understand')
        body = dict(dct)
        body.update({
            'model': DictModel(model_spec, policy_spec),
            'define': classmethod(_modelled_define),
            'value_type': classmethod(_modelled_value_type),
            '__init__': _modelled_init(dct),
            '__setitem__': _modelled_setitem,
            '__delitem__': _modelled_delitem,
        })
        return super().__new__(cls, str(name), bases, body)
    @classmethod
    def declare(cls, name):
        """Forward declare a class whose model will be defined later."""
        return cls(name, (dict,), {})
