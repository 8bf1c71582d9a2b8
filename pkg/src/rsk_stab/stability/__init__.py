### SPDX-License-Identifier: GPL-2.0-or-later

"""Empirical stability estimators and theoretical stability bounds."""

from . import occupancy
from . import bounds
from . import empirical
