### SPDX-License-Identifier: GPL-2.0-or-later

"""Export contained modules."""

from . import constraint
from . import encoding
from . import value
