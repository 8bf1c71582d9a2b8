### SPDX-License-Identifier: GPL-2.0-or-later

"""Datasets, perturbations, resampling, losses, risk estimators and seeding."""

from . import data
from . import losses
from . import parallel
from . import resample
from . import risk
from . import seed
from . import synthetic
