### SPDX-License-Identifier: GPL-2.0-or-later

"""Ensemble constructions and their trainable recipes."""

from . import ensemble
from . import bagging
from . import adaboost
from . import stacking
from . import weighted
from . import recipes
